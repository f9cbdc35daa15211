// Sequential updating for two urns, with and without replacement.

#include <iostream>

#include "kernelbayes/kernelbayes.hpp"

int main() {
  using namespace kb;
  const auto urns = MeasurableSpace::discrete({"mostly_red", "mostly_black"});
  const auto colours = MeasurableSpace::discrete({"red", "black"});
  const auto prior = Probability::uniform(urns);
  // Urn contents {r, r, b} and {r, b, b}.
  const auto draw = StochasticKernel::from_rows(urns, colours, {{Rational(2, 3), Rational(1, 3)}, {Rational(1, 3), Rational(2, 3)}});
  const BayesModel model(prior, draw);

  const auto first = inference(model);
  std::cout << "predictive P_D: " << to_string(first.data_prior) << "\n";
  std::cout << "inference map:\n" << to_string(first.inference);

  const auto red = dirac(colours, "red");
  const auto black = dirac(colours, "black");
  const std::vector<Probability> seen{red, red, black};

  std::cout << "\nwith replacement (red, red, black):\n";
  for (const auto& p : update_loop(model, seen)) std::cout << "  " << to_string(p) << "\n";

  // Without replacement the sampling kernel changes after each draw.
  std::vector<int> reds_left{2, 1}, blacks_left{1, 2};
  const Resample remove_drawn = [&](std::size_t step, const Probability&, const StochasticKernel&) {
    auto& pile = seen[step] == red ? reds_left : blacks_left;
    for (auto& n : pile) n = n > 0 ? n - 1 : 0;
    std::vector<std::vector<Rational>> rows;
    for (std::size_t u = 0; u < 2; ++u) {
      const int total = reds_left[u] + blacks_left[u];
      rows.push_back(total == 0 ? std::vector<Rational>{Rational(1, 2), Rational(1, 2)}
                                : std::vector<Rational>{Rational(reds_left[u], total), Rational(blacks_left[u], total)});
    }
    return StochasticKernel::from_rows(urns, colours, rows);
  };
  std::cout << "\nwithout replacement (red, red, black):\n";
  try {
    for (const auto& p : update_loop(model, seen, remove_drawn)) std::cout << "  " << to_string(p) << "\n";
  } catch (const Error& e) {
    std::cout << "  stopped: " << e.what() << "\n";
  }
  return 0;
}
