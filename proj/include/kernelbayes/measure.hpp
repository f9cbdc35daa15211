#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kernelbayes/error.hpp"
#include "kernelbayes/rational.hpp"
#include "kernelbayes/space.hpp"

namespace kb {

/// An exact probability measure on a finite measurable space, stored as one
/// nonnegative weight per atom. Weights always sum to exactly one.
class Probability {
 public:
  Probability(MeasurableSpace space, std::vector<Rational> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (weights_.size() != space_.atom_count())
      throw Error(Errc::InvalidMeasure, "expected " + std::to_string(space_.atom_count()) + " atom weights, got " +
                                            std::to_string(weights_.size()));
    Rational total = 0;
    for (const auto& w : weights_) {
      if (w < 0) throw Error(Errc::InvalidMeasure, "negative weight " + format_rational(w));
      total += w;
    }
    if (total != 1) throw Error(Errc::InvalidMeasure, "weights sum to " + format_rational(total) + ", not 1");
  }

  /// Equal weight on every atom.
  static Probability uniform(const MeasurableSpace& space) {
    return Probability(space, std::vector<Rational>(space.atom_count(), Rational(1, space.atom_count())));
  }

  const MeasurableSpace& space() const { return space_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(std::size_t atom) const { return weights_.at(atom); }

  friend bool operator==(const Probability& l, const Probability& r) {
    return l.space_ == r.space_ && l.weights_ == r.weights_;
  }

  /// Lexicographic on weights; only meaningful between measures on the same space.
  friend bool operator<(const Probability& l, const Probability& r) { return l.weights_ < r.weights_; }

 private:
  MeasurableSpace space_;
  std::vector<Rational> weights_;
};

/// Point mass at x: weight one on the atom containing x.
inline Probability dirac(const MeasurableSpace& space, std::size_t point) {
  if (point >= space.point_count()) throw Error(Errc::UnknownPoint, "dirac: point index out of range");
  std::vector<Rational> w(space.atom_count(), Rational(0));
  w[space.atom_of(point)] = 1;
  return Probability(space, std::move(w));
}

inline Probability dirac(const MeasurableSpace& space, std::string_view label) {
  return dirac(space, space.index_of(label));
}

inline Rational evaluate(const Probability& p, const MeasurableSet& a) {
  require_same_space(p.space(), a.space(), "evaluate: set is not on the measure's space");
  Rational total = 0;
  for (std::size_t i : a.atom_indices()) total += p.weight(i);
  return total;
}

/// f_*P, the image measure: (f_*P)(B) = P(f⁻¹B).
inline Probability pushforward(const MeasurableFunction& f, const Probability& p) {
  require_same_space(f.domain(), p.space(), "pushforward: measure is not on the function's domain");
  std::vector<Rational> w(f.codomain().atom_count(), Rational(0));
  for (std::size_t a = 0; a < f.domain().atom_count(); ++a) w[f.image_atom(a)] += p.weight(a);
  return Probability(f.codomain(), std::move(w));
}

/// A rational-valued function on the points of a space. It is measurable iff
/// it is constant on each atom.
struct SimpleFunction {
  MeasurableSpace space;
  std::vector<Rational> values;  // one per point

  static SimpleFunction constant(const MeasurableSpace& space, const Rational& c) {
    return {space, std::vector<Rational>(space.point_count(), c)};
  }

  static SimpleFunction indicator(const MeasurableSet& a) {
    const auto& s = a.space();
    std::vector<Rational> v(s.point_count());
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = a.contains_point(p) ? 1 : 0;
    return {s, std::move(v)};
  }

  static SimpleFunction from_atom_values(const MeasurableSpace& space, const std::vector<Rational>& per_atom) {
    if (per_atom.size() != space.atom_count()) throw Error(Errc::ValidationError, "one value per atom expected");
    std::vector<Rational> v(space.point_count());
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = per_atom[space.atom_of(p)];
    return {space, std::move(v)};
  }

  /// Values per atom; throws NotMeasurable if the function varies inside an atom.
  std::vector<Rational> atom_values() const {
    if (values.size() != space.point_count()) throw Error(Errc::ValidationError, "one value per point expected");
    std::vector<Rational> out(space.atom_count());
    for (std::size_t a = 0; a < space.atom_count(); ++a) {
      auto block = space.atom(a);
      out[a] = values[block.front()];
      for (std::size_t p : block)
        if (values[p] != out[a]) throw Error(Errc::NotMeasurable, "function is not constant on atom " + space.atom_label(a));
    }
    return out;
  }
};

inline Rational integrate(const SimpleFunction& s, const Probability& p) {
  require_same_space(s.space, p.space(), "integrate: function and measure live on different spaces");
  const auto values = s.atom_values();
  Rational total = 0;
  for (std::size_t a = 0; a < values.size(); ++a) total += values[a] * p.weight(a);
  return total;
}

/// mu ≪ P: every P-null atom is mu-null.
inline bool is_absolutely_continuous(const Probability& mu, const Probability& p) {
  require_same_space(mu.space(), p.space(), "absolute continuity across different spaces");
  for (std::size_t a = 0; a < p.space().atom_count(); ++a)
    if (p.weight(a) == 0 && mu.weight(a) != 0) return false;
  return true;
}

/// "label: n/d, label: n/d" in atom order.
inline std::string to_string(const Probability& p) {
  std::string out;
  for (std::size_t a = 0; a < p.space().atom_count(); ++a) {
    if (a) out += ", ";
    out += p.space().atom_label(a) + ": " + format_rational(p.weight(a));
  }
  return out;
}

}  // namespace kb
