#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kernelbayes/kernel.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/space.hpp"

namespace kb::testing {

/// Deterministic random instances for property tests.
class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin(unsigned percent = 50) { return below(100) < percent; }

  /// A space with the given number of atoms; sometimes atoms hold several points.
  MeasurableSpace space(std::size_t atoms, const std::string& prefix = "p") {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> blocks(atoms);
    std::size_t next = 0;
    for (std::size_t a = 0; a < atoms; ++a) {
      const std::size_t size = coin(25) ? 2 : 1;
      for (std::size_t k = 0; k < size; ++k) {
        labels.push_back(prefix + std::to_string(next));
        blocks[a].push_back(next++);
      }
    }
    return MeasurableSpace::from_index_blocks(std::move(labels), std::move(blocks));
  }

  MeasurableSpace space_up_to(std::size_t max_atoms, const std::string& prefix = "p") {
    return space(between(1, max_atoms), prefix);
  }

  /// Nonnegative integer weights normalized to one; zero_percent controls sparsity.
  std::vector<Rational> simplex(std::size_t k, unsigned zero_percent = 20) {
    std::vector<std::uint64_t> raw(k);
    std::uint64_t total = 0;
    for (auto& r : raw) {
      r = coin(zero_percent) ? 0 : 1 + below(12);
      total += r;
    }
    if (total == 0) {
      raw[below(k)] = 1;
      total = 1;
    }
    std::vector<Rational> out;
    for (auto r : raw) out.emplace_back(Rational(r, total));
    return out;
  }

  Probability probability(const MeasurableSpace& s, unsigned zero_percent = 20) {
    return Probability(s, simplex(s.atom_count(), zero_percent));
  }

  StochasticKernel kernel(const MeasurableSpace& from, const MeasurableSpace& to, unsigned zero_percent = 20) {
    std::vector<Rational> flat;
    for (std::size_t r = 0; r < from.atom_count(); ++r) {
      auto row = simplex(to.atom_count(), zero_percent);
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return StochasticKernel(from, to, std::move(flat));
  }

  /// A random measurable map: each domain atom goes to a random codomain point.
  MeasurableFunction function(const MeasurableSpace& from, const MeasurableSpace& to) {
    std::vector<std::size_t> image(from.point_count());
    for (const auto& block : from.atoms()) {
      const std::size_t target = below(to.point_count());
      for (std::size_t p : block) image[p] = target;
    }
    return MeasurableFunction::make({from, to, std::move(image)});
  }

  MeasurableSet subset(const MeasurableSpace& s) {
    std::vector<std::size_t> atoms;
    for (std::size_t a = 0; a < s.atom_count(); ++a)
      if (coin()) atoms.push_back(a);
    return MeasurableSet::of_atoms(s, atoms);
  }

  /// Atom-constant rational values in [0, 1] with small denominators.
  std::vector<Rational> unit_values(std::size_t k) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t den = between(1, 6);
      out.emplace_back(Rational(below(den + 1), den));
    }
    return out;
  }

  Rational small_rational(std::size_t max_den = 5, std::size_t max_num = 10) {
    return Rational(below(max_num + 1), between(1, max_den));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace kb::testing
