#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kernelbayes/bayes.hpp"
#include "kernelbayes/error.hpp"
#include "kernelbayes/giry.hpp"
#include "kernelbayes/scenario.hpp"
#include "kernelbayes/transport.hpp"

namespace kb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitViolations = 4;

inline constexpr std::size_t kDefaultLawSamples = 100;
inline constexpr std::size_t kDefaultApResolution = 100;

struct Report {
  std::string out;
  std::string err;
  int exit_code = kExitOk;
};

inline int exit_code_for(Errc code) {
  return code == Errc::MeasurementNotAbsolutelyContinuous ? kExitPrecondition : kExitInvalid;
}

/// Runs body(out) and turns library errors into an exit code plus a message on err.
/// Whatever body printed before failing is kept.
template <typename Body>
Report run(Body&& body) {
  Report report;
  std::ostringstream out;
  try {
    report.exit_code = body(out);
  } catch (const Error& e) {
    report.exit_code = exit_code_for(e.code());
    report.err = std::string("error: ") + e.what() + "\n";
  }
  report.out = out.str();
  return report;
}

/// "(w1,w2,...)" in atom order, matching simplex grid labels.
inline std::string tuple_of(const Probability& p) {
  std::string s = "(";
  for (std::size_t a = 0; a < p.space().atom_count(); ++a) {
    if (a) s += ",";
    s += format_rational(p.weight(a));
  }
  return s + ")";
}

inline std::string describe(const SecondOrderMeasure& q) {
  std::string s;
  for (const auto& [p, w] : q.support()) {
    if (!s.empty()) s += " + ";
    s += format_rational(w) + "*" + tuple_of(p);
  }
  return s;
}

inline std::string describe(const DecisionRule& rule) {
  std::string s;
  for (const auto& c : rule.clauses()) s += "if " + c.when.describe() + " then " + rule.base_space().label(c.output) + "; ";
  return s + "else " + rule.base_space().label(rule.default_output());
}

inline Report cmd_infer(const std::string& path) {
  return run([&](std::ostream& out) {
    out << "command: infer " << path << "\n";
    const auto sc = load_scenario_file(path);
    out << "digest: " << digest(sc) << "\n";
    const auto model = sc.bayes_model();
    const auto res = inference(model);
    out << "prior P_H: " << to_string(model.prior()) << "\n";
    out << "data prior P_D: " << to_string(res.data_prior) << "\n";
    out << "inference map D -> H:\n";
    for (std::size_t d = 0; d < res.inference.rows(); ++d)
      out << "  " << res.inference.domain().atom_label(d) << " -> " << to_string(res.inference.row(d)) << "\n";
    const auto measurements = sc.measurement_values();
    try {
      const auto posteriors = update_loop(model, measurements);
      for (std::size_t i = 0; i < posteriors.size(); ++i)
        out << "posterior " << i + 1 << " (" << sc.measurements[i] << "): " << to_string(posteriors[i]) << "\n";
    } catch (const Error& e) {
      if (e.code() != Errc::MeasurementNotAbsolutelyContinuous || !e.step()) throw;
      const std::size_t step = *e.step();
      throw Error(e.code(), "measurement " + std::to_string(step + 1) + " ('" + sc.measurements[step] +
                                "') is not absolutely continuous with respect to that step's P_D",
                  step);
    }
    return kExitOk;
  });
}

/// --seed beats KERNELBAYES_SEED, which beats the scenario's seed, which beats the default.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env, std::optional<std::uint64_t> scenario) {
  if (flag) return *flag;
  if (env && *env) {
    const std::string text(env);
    if (!detail::all_digits(text)) throw Error(Errc::ParseError, "KERNELBAYES_SEED is not a nonnegative integer");
    return std::stoull(text);
  }
  if (scenario) return *scenario;
  return kDefaultSeed;
}

inline Report cmd_laws(const std::string& path, std::size_t samples, std::optional<std::uint64_t> seed_flag,
                       const char* env_seed) {
  return run([&](std::ostream& out) {
    const auto sc = load_scenario_file(path);
    if (!sc.laws) throw Error(Errc::ValidationError, "laws: scenario defines no decision rule");
    const std::uint64_t seed = resolve_seed(seed_flag, env_seed, sc.seed);
    out << "command: laws " << path << " --samples " << samples << " --seed " << seed << "\n";
    out << "digest: " << digest(sc) << "\n";
    const auto& laws = *sc.laws;
    const auto grid = simplex_grid(laws.rule.base_space(), laws.resolution);
    out << "grid: resolution " << grid.resolution() << " over '" << laws.space << "' (" << grid.size() << " points)\n";
    out << "rule: " << describe(laws.rule) << "\n";

    SampleGenerator gen(seed);
    std::vector<SecondOrderMeasure> second = laws.samples;
    for (std::size_t i = 0; i < samples; ++i) second.push_back(gen.second_order(grid));
    std::vector<ThirdOrderMeasure> third;
    for (std::size_t i = 0; i < samples; ++i) third.push_back(gen.third_order(grid));

    const auto monad = check_monad_laws(grid, third);
    const auto algebra = check_algebra(laws.rule, grid, second);

    const std::size_t unit_fail = monad.left_unit_failures.size() + monad.right_unit_failures.size();
    out << "monad unit laws: " << 2 * monad.unit_checks - unit_fail << "/" << 2 * monad.unit_checks << " pass\n";
    out << "monad associativity: " << monad.associativity_checks - monad.associativity_failures.size() << "/"
        << monad.associativity_checks << " pass\n";
    out << "algebra unit law: " << algebra.unit_checks - algebra.unit.size() << "/" << algebra.unit_checks << " pass\n";
    out << "algebra associativity: " << algebra.associativity_checks - algebra.associativity.size() << "/"
        << algebra.associativity_checks << " pass (" << laws.samples.size() << " from scenario)\n";

    const auto& base = laws.rule.base_space();
    for (std::size_t i : monad.left_unit_failures) out << "violation: monad left unit at grid point " << grid.space().label(i) << "\n";
    for (std::size_t i : monad.right_unit_failures) out << "violation: monad right unit at grid point " << grid.space().label(i) << "\n";
    for (std::size_t i : monad.associativity_failures) out << "violation: monad associativity on third-order sample " << i + 1 << "\n";
    for (const auto& v : algebra.unit)
      out << "violation: unit law at " << base.label(v.point) << ": rule(delta) = " << base.label(v.decided) << "\n";
    for (const auto& v : algebra.associativity) {
      out << "violation: associativity on sample " << v.sample_index + 1
          << (v.sample_index < laws.samples.size() ? " (scenario)" : " (generated)") << ": Q = " << describe(v.sample)
          << "; mu then rule -> " << base.label(v.via_multiplication) << "; T(rule) then rule -> "
          << base.label(v.via_pushforward) << "\n";
    }
    const std::size_t total = unit_fail + monad.associativity_failures.size() + algebra.unit.size() + algebra.associativity.size();
    out << "violations: " << total << "\n";
    return total == 0 ? kExitOk : kExitViolations;
  });
}

inline Report cmd_transport(const std::string& path) {
  return run([&](std::ostream& out) {
    out << "command: transport " << path << "\n";
    const auto sc = load_scenario_file(path);
    out << "digest: " << digest(sc) << "\n";
    const auto prob = sc.transport_problem();
    const auto plan = solve_transport(prob);
    const auto cert = certify_plan(prob, plan);
    const auto& xs = prob.supply.space();
    const auto& ys = prob.demand.space();
    out << "plan:\n";
    for (std::size_t i = 0; i < prob.rows(); ++i) {
      out << "  " << xs.atom_label(i) << ":";
      for (std::size_t j = 0; j < prob.cols(); ++j) out << " " << format_rational(plan.joint.at(i, j));
      out << "\n";
    }
    out << "objective: " << format_rational(plan.objective) << "\n";
    out << "certificate: " << (cert.optimal ? "optimal" : "NOT CERTIFIED") << "\n";
    if (cert.optimal) {
      out << "  row potentials:";
      for (std::size_t i = 0; i < prob.rows(); ++i) out << " " << xs.atom_label(i) << "=" << format_rational(cert.row_potentials[i]);
      out << "\n  column potentials:";
      for (std::size_t j = 0; j < prob.cols(); ++j) out << " " << ys.atom_label(j) << "=" << format_rational(cert.column_potentials[j]);
      out << "\n  dual objective: " << format_rational(cert.dual_objective) << "\n";
    }
    return cert.optimal ? kExitOk : kExitViolations;
  });
}

/// distribution is "uniform" or "point:<theta>" with theta a rational in [0, 1].
inline Report cmd_ap(std::size_t resolution, const std::string& distribution) {
  return run([&](std::ostream& out) {
    out << "command: ap --resolution " << resolution << " --distribution " << distribution << "\n";
    if (resolution == 0) throw Error(Errc::ParseError, "--resolution must be positive");
    std::optional<Rational> theta;
    if (distribution.rfind("point:", 0) == 0) {
      theta = parse_rational(distribution.substr(6));
      if (*theta < 0 || *theta > 1) throw Error(Errc::ParseError, "point parameter must lie in [0,1]");
    } else if (distribution != "uniform") {
      throw Error(Errc::ParseError, "--distribution must be 'uniform' or 'point:<p>'");
    }
    const std::size_t n = theta ? resolution_containing(resolution, *theta) : resolution;
    const auto grid = simplex_grid(two_point(), n);
    out << "grid: resolution " << n << " over 2 (" << grid.size() << " Bernoulli parameters)";
    if (n != resolution) out << ", refined from " << resolution << " to contain B_" << format_rational(*theta);
    out << "\n";
    const auto ap = theta ? ap_point_mass(grid, *theta) : ap_uniform(grid);
    out << "distribution over Bernoulli parameters:\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << "  B_" << format_rational(grid.point(i).weight(0)) << ": " << format_rational(ap.weight(i)) << "\n";
    out << "E(A_p) = " << format_rational(ap_expectation(grid, ap)) << "\n";
    return kExitOk;
  });
}

}  // namespace kb::cli
