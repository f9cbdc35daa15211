// Decision rules on the two-point space and second-order expectations.

#include <iostream>

#include "kernelbayes/kernelbayes.hpp"

namespace {

void report(const char* name, const kb::DecisionRule& rule, const kb::SimplexGrid& grid,
            const std::vector<kb::SecondOrderMeasure>& samples) {
  const auto r = kb::check_algebra(rule, grid, samples);
  std::cout << name << ": unit law " << (r.unit.empty() ? "holds" : "fails") << ", associativity "
            << r.associativity_checks - r.associativity.size() << "/" << r.associativity_checks << "\n";
  for (std::size_t i = 0; i < r.associativity.size() && i < 3; ++i) {
    const auto& v = r.associativity[i];
    std::cout << "  sample " << v.sample_index << ": mu route -> " << grid.base_space().label(v.via_multiplication)
              << ", pushforward route -> " << grid.base_space().label(v.via_pushforward) << "\n";
  }
  if (r.associativity.size() > 3) std::cout << "  ...\n";
}

}  // namespace

int main() {
  using namespace kb;
  const auto grid = simplex_grid(two_point(), 10);
  SampleGenerator gen;
  std::vector<SecondOrderMeasure> samples;
  for (int i = 0; i < 200; ++i) samples.push_back(gen.second_order(grid));
  samples.push_back(SecondOrderMeasure({{bernoulli(Rational(3, 5)), Rational(1, 2)}, {bernoulli(0), Rational(1, 2)}}));

  report("certainty rule", certainty_rule(), grid, samples);
  report("threshold rule 1/2", threshold_rule(Rational(1, 2)), grid, samples);

  for (std::size_t n : {2, 10, 100}) {
    const auto g = simplex_grid(two_point(), n);
    std::cout << "n=" << n << ": E(point mass at 1/2) = " << format_rational(ap_expectation(g, ap_point_mass(g, Rational(1, 2))))
              << ", E(uniform) = " << format_rational(ap_expectation(g, ap_uniform(g))) << "\n";
  }
  return 0;
}
