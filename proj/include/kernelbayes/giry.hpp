#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "kernelbayes/error.hpp"
#include "kernelbayes/kernel.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/rational.hpp"
#include "kernelbayes/space.hpp"

namespace kb {

/// A finitely supported probability distribution over values of T.
///
/// The support is kept canonical: sorted by value, duplicates merged, zero
/// weights dropped. T needs operator== and operator<.
template <typename T>
class Dist {
 public:
  using value_type = T;
  using Entry = std::pair<T, Rational>;

  explicit Dist(std::vector<Entry> entries) {
    Rational total = 0;
    for (const auto& [value, w] : entries) {
      if (w < 0) throw Error(Errc::InvalidMeasure, "negative weight in finite distribution");
      total += w;
    }
    if (total != 1) throw Error(Errc::InvalidMeasure, "finite distribution weights sum to " + format_rational(total));
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& l, const Entry& r) { return l.first < r.first; });
    for (auto& e : entries) {
      if (e.second == 0) continue;
      if (!support_.empty() && support_.back().first == e.first)
        support_.back().second += e.second;
      else
        support_.push_back(std::move(e));
    }
  }

  static Dist pure(T value) { return Dist({{std::move(value), Rational(1)}}); }

  const std::vector<Entry>& support() const { return support_; }

  /// Pushforward along f (the functor action T f).
  template <typename F>
  auto map(F&& f) const -> Dist<std::decay_t<std::invoke_result_t<F, const T&>>> {
    using U = std::decay_t<std::invoke_result_t<F, const T&>>;
    std::vector<std::pair<U, Rational>> out;
    out.reserve(support_.size());
    for (const auto& [value, w] : support_) out.emplace_back(f(value), w);
    return Dist<U>(std::move(out));
  }

  friend bool operator==(const Dist& l, const Dist& r) { return l.support_ == r.support_; }

  friend bool operator<(const Dist& l, const Dist& r) {
    return std::lexicographical_compare(l.support_.begin(), l.support_.end(), r.support_.begin(), r.support_.end(),
                                        [](const Entry& a, const Entry& b) {
                                          if (a.first < b.first) return true;
                                          if (b.first < a.first) return false;
                                          return a.second < b.second;
                                        });
  }

 private:
  std::vector<Entry> support_;
};

/// Flattens a distribution of distributions.
template <typename T>
Dist<T> join(const Dist<Dist<T>>& nested) {
  std::vector<std::pair<T, Rational>> out;
  for (const auto& [inner, w] : nested.support())
    for (const auto& [value, v] : inner.support()) out.emplace_back(value, w * v);
  return Dist<T>(std::move(out));
}

/// An element of T²X with finite support: a mixture of measures on one base space.
using SecondOrderMeasure = Dist<Probability>;
using ThirdOrderMeasure = Dist<SecondOrderMeasure>;

inline const MeasurableSpace& base_space(const SecondOrderMeasure& q) { return q.support().front().first.space(); }

/// η_X(x) = δ_x.
inline Probability unit(const MeasurableSpace& space, std::size_t point) { return dirac(space, point); }

/// μ_X(Q)(A) = Σ_i w_i q_i(A).
inline Probability mu(const SecondOrderMeasure& q) {
  const auto& space = base_space(q);
  std::vector<Rational> w(space.atom_count(), Rational(0));
  for (const auto& [measure, weight] : q.support()) {
    require_same_space(measure.space(), space, "mu: mixture components live on different spaces");
    for (std::size_t a = 0; a < w.size(); ++a) w[a] += weight * measure.weight(a);
  }
  return Probability(space, std::move(w));
}

/// (T η_X)(q): each atom a carries q(a) on the point mass at a.
inline SecondOrderMeasure lift_units(const Probability& q) {
  std::vector<std::pair<Probability, Rational>> entries;
  for (std::size_t a = 0; a < q.space().atom_count(); ++a)
    entries.emplace_back(dirac(q.space(), q.space().atom(a).front()), q.weight(a));
  return SecondOrderMeasure(std::move(entries));
}

/// (T S)(P) for a kernel S: the image of P in T²D with row S(a, ·) weighted by P(a).
inline SecondOrderMeasure push_rows(const StochasticKernel& s, const Probability& p) {
  require_same_space(p.space(), s.domain(), "push_rows: measure is not on the kernel's domain");
  std::vector<std::pair<Probability, Rational>> entries;
  for (std::size_t a = 0; a < s.rows(); ++a) entries.emplace_back(s.row(a), p.weight(a));
  return SecondOrderMeasure(std::move(entries));
}

/// Ŝ = μ_D ∘ T S, computed through the second-order image.
inline std::function<Probability(const Probability&)> kleisli_extend(StochasticKernel s) {
  return [s = std::move(s)](const Probability& p) { return mu(push_rows(s, p)); };
}

/// All measures on the atoms of a base space whose weights are multiples of
/// 1/n, as a discrete measurable space. Stands in for 𝒫X at finite resolution.
class SimplexGrid {
 public:
  SimplexGrid(MeasurableSpace base, std::size_t resolution) : base_(std::move(base)), n_(resolution) {
    if (n_ == 0) throw Error(Errc::ValidationError, "grid resolution must be positive");
    const std::size_t k = base_.atom_count();
    std::vector<std::size_t> counts(k, 0);
    std::vector<std::string> labels;
    enumerate(counts, 0, n_, labels);
    space_ = std::make_shared<MeasurableSpace>(MeasurableSpace::discrete(std::move(labels)));
  }

  const MeasurableSpace& base_space() const { return base_; }
  std::size_t resolution() const { return n_; }
  const MeasurableSpace& space() const { return *space_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Probability>& points() const { return points_; }
  const Probability& point(std::size_t i) const { return points_.at(i); }

  std::optional<std::size_t> find(const Probability& p) const {
    if (!(p.space() == base_)) return std::nullopt;
    auto it = index_.find(p.weights());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void enumerate(std::vector<std::size_t>& counts, std::size_t pos, std::size_t remaining,
                 std::vector<std::string>& labels) {
    if (pos + 1 == counts.size()) {
      counts[pos] = remaining;
      std::vector<Rational> w(counts.size());
      std::string label = "(";
      for (std::size_t a = 0; a < counts.size(); ++a) {
        w[a] = Rational(counts[a], n_);
        if (a) label += ",";
        label += format_rational(w[a]);
      }
      index_.emplace(w, points_.size());
      points_.emplace_back(base_, std::move(w));
      labels.push_back(label + ")");
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      enumerate(counts, pos + 1, remaining - c, labels);
    }
  }

  MeasurableSpace base_;
  std::size_t n_;
  std::shared_ptr<MeasurableSpace> space_;
  std::vector<Probability> points_;
  std::map<std::vector<Rational>, std::size_t> index_;
};

inline SimplexGrid simplex_grid(const MeasurableSpace& base, std::size_t resolution) {
  return SimplexGrid(base, resolution);
}

/// The counit at grid scale: the grid point P goes to P itself.
inline StochasticKernel evaluation_kernel(const SimplexGrid& grid) {
  return StochasticKernel::from_measures(grid.space(), grid.points());
}

/// T f between grids of equal resolution: q ↦ f_* q.
inline MeasurableFunction grid_pushforward(const MeasurableFunction& f, const SimplexGrid& from, const SimplexGrid& to) {
  require_same_space(f.domain(), from.base_space(), "grid_pushforward: f does not start at the source base");
  require_same_space(f.codomain(), to.base_space(), "grid_pushforward: f does not end at the target base");
  std::vector<std::size_t> image(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto j = to.find(pushforward(f, from.point(i)));
    if (!j) throw Error(Errc::SampleOffGrid, "pushforward leaves the target grid");
    image[i] = *j;
  }
  return MeasurableFunction::make({from.space(), to.space(), std::move(image)});
}

/// B_θ = θ δ_⊤ + (1 − θ) δ_⊥.
inline Probability bernoulli(const Rational& theta) { return Probability(two_point(), {theta, 1 - theta}); }

/// E(A_p) = (ε_2 ∘ A_p)({⊤}) for a distribution A_p over a grid on 2.
inline Rational ap_expectation(const SimplexGrid& grid, const Probability& ap) {
  require_same_space(grid.base_space(), two_point(), "ap_expectation: grid is not over 2");
  require_same_space(ap.space(), grid.space(), "ap_expectation: distribution is not on the grid");
  return apply(evaluation_kernel(grid), ap).weight(0);
}

/// Point mass at B_θ on the grid.
inline Probability ap_point_mass(const SimplexGrid& grid, const Rational& theta) {
  auto i = grid.find(bernoulli(theta));
  if (!i) throw Error(Errc::SampleOffGrid, "B_" + format_rational(theta) + " is not a grid point");
  return dirac(grid.space(), *i);
}

inline Probability ap_uniform(const SimplexGrid& grid) { return Probability::uniform(grid.space()); }

/// Smallest resolution that is a multiple of n and contains B_θ.
inline std::size_t resolution_containing(std::size_t n, const Rational& theta) {
  const auto den = static_cast<std::size_t>(boost::multiprecision::denominator(theta));
  return std::lcm(n, den);
}

// ---------------------------------------------------------------------------
// Decision rules

enum class Comparator { Less, LessEq, Equal, GreaterEq, Greater };

inline std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
    case Comparator::Equal: return "=";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Greater: return ">";
  }
  return "?";
}

inline Comparator parse_comparator(std::string_view s) {
  if (s == "<") return Comparator::Less;
  if (s == "<=" || s == "≤") return Comparator::LessEq;
  if (s == "=" || s == "==") return Comparator::Equal;
  if (s == ">=" || s == "≥") return Comparator::GreaterEq;
  if (s == ">") return Comparator::Greater;
  throw Error(Errc::ParseError, "unknown comparator '" + std::string(s) + "'");
}

inline bool compare(const Rational& lhs, Comparator c, const Rational& rhs) {
  switch (c) {
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEq: return lhs <= rhs;
    case Comparator::Equal: return lhs == rhs;
    case Comparator::GreaterEq: return lhs >= rhs;
    case Comparator::Greater: return lhs > rhs;
  }
  return false;
}

/// A finite boolean combination of threshold atoms "P(A) ⋈ c". Each atom is a
/// measurable function of the evaluation map ev_A, so every predicate is
/// measurable for the σ-algebra generated by the evaluations.
class Predicate {
 public:
  enum class Kind { Threshold, All, Any, Not };

  static Predicate threshold(MeasurableSet set, Comparator cmp, Rational value) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Threshold;
    node->set = std::move(set);
    node->cmp = cmp;
    node->value = std::move(value);
    return Predicate(std::move(node));
  }

  static Predicate all_of(std::vector<Predicate> parts) { return combine(Kind::All, std::move(parts)); }
  static Predicate any_of(std::vector<Predicate> parts) { return combine(Kind::Any, std::move(parts)); }
  static Predicate negate(Predicate p) { return combine(Kind::Not, {std::move(p)}); }

  Kind kind() const { return node_->kind; }
  const MeasurableSet& set() const { return *node_->set; }
  Comparator comparator() const { return node_->cmp; }
  const Rational& value() const { return node_->value; }
  const std::vector<Predicate>& children() const { return node_->children; }

  bool operator()(const Probability& p) const {
    switch (node_->kind) {
      case Kind::Threshold: return compare(evaluate(p, *node_->set), node_->cmp, node_->value);
      case Kind::All:
        return std::all_of(node_->children.begin(), node_->children.end(), [&](const Predicate& c) { return c(p); });
      case Kind::Any:
        return std::any_of(node_->children.begin(), node_->children.end(), [&](const Predicate& c) { return c(p); });
      case Kind::Not: return !node_->children.front()(p);
    }
    return false;
  }

  /// Calls f on every threshold set in the tree.
  template <typename F>
  void for_each_set(F&& f) const {
    if (node_->kind == Kind::Threshold) {
      f(*node_->set);
      return;
    }
    for (const auto& c : node_->children) c.for_each_set(f);
  }

  std::string describe() const {
    switch (node_->kind) {
      case Kind::Threshold: {
        std::string s = "P({";
        const auto& sp = node_->set->space();
        bool first = true;
        for (std::size_t a : node_->set->atom_indices()) {
          if (!first) s += ",";
          s += sp.atom_label(a);
          first = false;
        }
        return s + "}) " + std::string(to_string(node_->cmp)) + " " + format_rational(node_->value);
      }
      case Kind::Not: return "not " + node_->children.front().describe();
      case Kind::All:
      case Kind::Any: {
        std::string s = "(";
        for (std::size_t i = 0; i < node_->children.size(); ++i) {
          if (i) s += node_->kind == Kind::All ? " and " : " or ";
          s += node_->children[i].describe();
        }
        return s + ")";
      }
    }
    return "";
  }

 private:
  struct Node {
    Kind kind = Kind::Threshold;
    std::optional<MeasurableSet> set;
    Comparator cmp = Comparator::Equal;
    Rational value;
    std::vector<Predicate> children;
  };

  static Predicate combine(Kind kind, std::vector<Predicate> parts) {
    if (parts.empty()) throw Error(Errc::ValidationError, "boolean combination with no operands");
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->children = std::move(parts);
    return Predicate(std::move(node));
  }

  explicit Predicate(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Clause {
  Predicate when;
  std::size_t output;  // point index in the base space
};

/// A map TX → X given by ordered clauses; the first matching clause decides,
/// otherwise the default point is returned.
class DecisionRule {
 public:
  DecisionRule(MeasurableSpace base, std::vector<Clause> clauses, std::size_t default_output)
      : base_(std::move(base)), clauses_(std::move(clauses)), default_(default_output) {
    if (default_ >= base_.point_count()) throw Error(Errc::UnknownPoint, "default output is not a point of the base");
    for (const auto& c : clauses_) {
      if (c.output >= base_.point_count()) throw Error(Errc::UnknownPoint, "clause output is not a point of the base");
      c.when.for_each_set([&](const MeasurableSet& s) {
        require_same_space(s.space(), base_, "clause threshold refers to a set of another space");
      });
    }
  }

  const MeasurableSpace& base_space() const { return base_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t default_output() const { return default_; }

  std::size_t operator()(const Probability& p) const {
    require_same_space(p.space(), base_, "decision rule applied to a measure on another space");
    for (const auto& c : clauses_)
      if (c.when(p)) return c.output;
    return default_;
  }

 private:
  MeasurableSpace base_;
  std::vector<Clause> clauses_;
  std::size_t default_;
};

/// d(P) = ⊤ if P({⊤}) = 1, else ⊥.
inline DecisionRule certainty_rule() {
  const auto two = two_point();
  return DecisionRule(two, {{Predicate::threshold(MeasurableSet::of_atoms(two, {0}), Comparator::Equal, 1), 0}}, 1);
}

/// P({⊤}) ≥ c → ⊤, else ⊥. Satisfies the unit law but not associativity for 0 < c < 1.
inline DecisionRule threshold_rule(const Rational& c) {
  const auto two = two_point();
  return DecisionRule(two, {{Predicate::threshold(MeasurableSet::of_atoms(two, {0}), Comparator::GreaterEq, c), 0}}, 1);
}

struct UnitViolation {
  std::size_t point;    // x
  std::size_t decided;  // rule(δ_x), in a different atom than x
};

struct AssociativityViolation {
  std::size_t sample_index;
  SecondOrderMeasure sample;
  std::size_t via_multiplication;  // rule(μ(Q))
  std::size_t via_pushforward;     // rule((T rule)(Q))
};

struct AlgebraReport {
  std::size_t unit_checks = 0;
  std::size_t associativity_checks = 0;
  std::vector<UnitViolation> unit;
  std::vector<AssociativityViolation> associativity;

  bool ok() const { return unit.empty() && associativity.empty(); }
};

/// (T rule)(Q): the decided points, weighted by Q, as a measure on X.
inline Probability push_decisions(const DecisionRule& rule, const SecondOrderMeasure& q) {
  const auto& base = rule.base_space();
  std::vector<Rational> w(base.atom_count(), Rational(0));
  for (const auto& [p, weight] : q.support()) w[base.atom_of(rule(p))] += weight;
  return Probability(base, std::move(w));
}

/// Checks the unit law on every point and the associative law on each sample.
/// Decisions are compared up to atoms, since points in one atom cannot be told apart.
inline AlgebraReport check_algebra(const DecisionRule& rule, const SimplexGrid& grid,
                                   const std::vector<SecondOrderMeasure>& samples) {
  require_same_space(rule.base_space(), grid.base_space(), "check_algebra: rule and grid have different bases");
  const auto& base = rule.base_space();
  AlgebraReport report;
  for (std::size_t x = 0; x < base.point_count(); ++x) {
    ++report.unit_checks;
    const std::size_t decided = rule(unit(base, x));
    if (base.atom_of(decided) != base.atom_of(x)) report.unit.push_back({x, decided});
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& q = samples[i];
    for (const auto& [p, w] : q.support())
      if (!grid.find(p)) throw Error(Errc::SampleOffGrid, "sample " + std::to_string(i) + " has support off the grid");
    ++report.associativity_checks;
    const std::size_t via_mu = rule(mu(q));
    const std::size_t via_push = rule(push_decisions(rule, q));
    if (base.atom_of(via_mu) != base.atom_of(via_push)) report.associativity.push_back({i, q, via_mu, via_push});
  }
  return report;
}

struct MonadLawReport {
  std::size_t unit_checks = 0;
  std::size_t associativity_checks = 0;
  std::vector<std::size_t> left_unit_failures;   // grid indices with μ(δ_q) ≠ q
  std::vector<std::size_t> right_unit_failures;  // grid indices with μ(T η (q)) ≠ q
  std::vector<std::size_t> associativity_failures;  // sample indices

  bool ok() const {
    return left_unit_failures.empty() && right_unit_failures.empty() && associativity_failures.empty();
  }
};

/// Unit laws on every grid point; μ ∘ T μ = μ ∘ μ_T on each third-order sample.
inline MonadLawReport check_monad_laws(const SimplexGrid& grid, const std::vector<ThirdOrderMeasure>& samples) {
  MonadLawReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& q = grid.point(i);
    ++report.unit_checks;
    if (!(mu(SecondOrderMeasure::pure(q)) == q)) report.left_unit_failures.push_back(i);
    if (!(mu(lift_units(q)) == q)) report.right_unit_failures.push_back(i);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ++report.associativity_checks;
    const auto& q3 = samples[i];
    const auto lhs = mu(q3.map([](const SecondOrderMeasure& q) { return mu(q); }));
    const auto rhs = mu(join(q3));
    if (!(lhs == rhs)) report.associativity_failures.push_back(i);
  }
  return report;
}

inline constexpr std::uint64_t kDefaultSeed = 271828;

/// Deterministic generator of finitely supported higher-order samples on a grid.
/// Uses the raw engine output only, so sequences are identical across platforms.
class SampleGenerator {
 public:
  explicit SampleGenerator(std::uint64_t seed = kDefaultSeed) : rng_(seed) {}

  SecondOrderMeasure second_order(const SimplexGrid& grid, std::size_t max_support = 3) {
    const std::size_t k = 1 + below(max_support);
    std::vector<std::pair<Probability, Rational>> entries;
    const auto weights = random_weights(k);
    for (std::size_t i = 0; i < k; ++i) entries.emplace_back(grid.point(below(grid.size())), weights[i]);
    return SecondOrderMeasure(std::move(entries));
  }

  ThirdOrderMeasure third_order(const SimplexGrid& grid, std::size_t max_support = 3) {
    const std::size_t k = 1 + below(max_support);
    std::vector<std::pair<SecondOrderMeasure, Rational>> entries;
    const auto weights = random_weights(k);
    for (std::size_t i = 0; i < k; ++i) entries.emplace_back(second_order(grid, max_support), weights[i]);
    return ThirdOrderMeasure(std::move(entries));
  }

 private:
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  std::vector<Rational> random_weights(std::size_t k) {
    std::vector<std::uint64_t> raw(k);
    std::uint64_t total = 0;
    for (auto& r : raw) {
      r = 1 + rng_() % 9;
      total += r;
    }
    std::vector<Rational> out;
    out.reserve(k);
    for (auto r : raw) out.emplace_back(Rational(r, total));
    return out;
  }

  std::mt19937_64 rng_;
};

}  // namespace kb
