#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernelbayes/error.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/rational.hpp"
#include "kernelbayes/space.hpp"

namespace kb {

/// A Markov kernel between finite measurable spaces, stored atom-to-atom as a
/// row-stochastic matrix. Row a is the probability measure f(a, ·) on the codomain.
///
/// Because rows are indexed by domain atoms, f(·, B) is constant on atoms and
/// therefore measurable without any further check.
class StochasticKernel {
 public:
  StochasticKernel(MeasurableSpace domain, MeasurableSpace codomain, std::vector<Rational> entries)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), entries_(std::move(entries)) {
    const std::size_t rows = domain_.atom_count(), cols = codomain_.atom_count();
    if (entries_.size() != rows * cols)
      throw Error(Errc::InvalidKernel, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    for (std::size_t r = 0; r < rows; ++r) {
      Rational total = 0;
      for (std::size_t c = 0; c < cols; ++c) {
        const auto& v = entries_[r * cols + c];
        if (v < 0) throw Error(Errc::InvalidKernel, "negative entry in row " + domain_.atom_label(r));
        total += v;
      }
      if (total != 1)
        throw Error(Errc::InvalidKernel, "row " + domain_.atom_label(r) + " sums to " + format_rational(total));
    }
  }

  static StochasticKernel from_rows(MeasurableSpace domain, MeasurableSpace codomain,
                                    const std::vector<std::vector<Rational>>& rows) {
    std::vector<Rational> flat;
    if (rows.size() != domain.atom_count())
      throw Error(Errc::InvalidKernel, "expected " + std::to_string(domain.atom_count()) + " rows");
    for (const auto& row : rows) {
      if (row.size() != codomain.atom_count())
        throw Error(Errc::InvalidKernel, "expected " + std::to_string(codomain.atom_count()) + " columns");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return StochasticKernel(std::move(domain), std::move(codomain), std::move(flat));
  }

  static StochasticKernel from_measures(MeasurableSpace domain, const std::vector<Probability>& rows) {
    if (rows.empty()) throw Error(Errc::InvalidKernel, "no rows");
    MeasurableSpace codomain = rows.front().space();
    std::vector<Rational> flat;
    for (const auto& r : rows) {
      require_same_space(r.space(), codomain, "kernel rows live on different spaces");
      flat.insert(flat.end(), r.weights().begin(), r.weights().end());
    }
    if (rows.size() != domain.atom_count()) throw Error(Errc::InvalidKernel, "one row per domain atom expected");
    return StochasticKernel(std::move(domain), std::move(codomain), std::move(flat));
  }

  static StochasticKernel identity(const MeasurableSpace& space) {
    const std::size_t k = space.atom_count();
    std::vector<Rational> flat(k * k, Rational(0));
    for (std::size_t a = 0; a < k; ++a) flat[a * k + a] = 1;
    return StochasticKernel(space, space, std::move(flat));
  }

  /// A measure P viewed as the arrow 1 → X.
  static StochasticKernel from_probability(const Probability& p) {
    return StochasticKernel(terminal(), p.space(), p.weights());
  }

  const MeasurableSpace& domain() const { return domain_; }
  const MeasurableSpace& codomain() const { return codomain_; }
  std::size_t rows() const { return domain_.atom_count(); }
  std::size_t cols() const { return codomain_.atom_count(); }
  const Rational& at(std::size_t row, std::size_t col) const { return entries_.at(row * cols() + col); }
  const std::vector<Rational>& entries() const { return entries_; }

  Probability row(std::size_t r) const {
    auto first = entries_.begin() + static_cast<std::ptrdiff_t>(r * cols());
    return Probability(codomain_, std::vector<Rational>(first, first + static_cast<std::ptrdiff_t>(cols())));
  }

  /// f(x, B) for a domain atom and a measurable set of the codomain.
  Rational operator()(std::size_t row, const MeasurableSet& b) const {
    require_same_space(b.space(), codomain_, "kernel evaluated on a set outside its codomain");
    Rational total = 0;
    for (std::size_t c : b.atom_indices()) total += at(row, c);
    return total;
  }

  /// A kernel out of a one-atom domain is exactly one measure.
  Probability to_probability() const {
    if (rows() != 1) throw Error(Errc::SpaceMismatch, "kernel domain has more than one atom");
    return row(0);
  }

  friend bool operator==(const StochasticKernel& l, const StochasticKernel& r) {
    return l.domain_ == r.domain_ && l.codomain_ == r.codomain_ && l.entries_ == r.entries_;
  }

 private:
  MeasurableSpace domain_;
  MeasurableSpace codomain_;
  std::vector<Rational> entries_;
};

/// g ∘ f: (g ∘ f)(x, C) = Σ_y f(x, y) g(y, C).
inline StochasticKernel compose(const StochasticKernel& g, const StochasticKernel& f) {
  require_same_space(f.codomain(), g.domain(), "compose: codomain of f is not the domain of g");
  const std::size_t n = f.rows(), m = f.cols(), k = g.cols();
  std::vector<Rational> out(n * k, Rational(0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) {
      const auto& fxy = f.at(x, y);
      if (fxy == 0) continue;
      for (std::size_t c = 0; c < k; ++c) out[x * k + c] += fxy * g.at(y, c);
    }
  return StochasticKernel(f.domain(), g.codomain(), std::move(out));
}

/// The deterministic kernel δ_f sending each point to the point mass at f(x).
inline StochasticKernel lift_dirac(const MeasurableFunction& f) {
  const auto& dom = f.domain();
  const auto& cod = f.codomain();
  std::vector<Rational> out(dom.atom_count() * cod.atom_count(), Rational(0));
  for (std::size_t a = 0; a < dom.atom_count(); ++a) {
    const std::size_t target = f.image_atom(a);
    for (std::size_t p : dom.atom(a))
      if (cod.atom_of(f(p)) != target)
        throw Error(Errc::NotWellDefined, "atom " + dom.atom_label(a) + " is sent into two codomain atoms");
    out[a * cod.atom_count() + target] = 1;
  }
  return StochasticKernel(dom, cod, std::move(out));
}

/// f ∘ P for P: 1 → X; the measure B ↦ ∫ f(·, B) dP.
inline Probability apply(const StochasticKernel& f, const Probability& p) {
  require_same_space(p.space(), f.domain(), "apply: measure is not on the kernel's domain");
  std::vector<Rational> out(f.cols(), Rational(0));
  for (std::size_t x = 0; x < f.rows(); ++x) {
    const auto& px = p.weight(x);
    if (px == 0) continue;
    for (std::size_t c = 0; c < f.cols(); ++c) out[c] += px * f.at(x, c);
  }
  return Probability(f.codomain(), std::move(out));
}

struct DeterminismReport {
  bool deterministic = false;
  /// Present only when the kernel is deterministic and codomain atoms are singletons.
  std::optional<MeasurableFunction> witness;
};

inline DeterminismReport is_deterministic(const StochasticKernel& f) {
  DeterminismReport report;
  for (const auto& v : f.entries())
    if (v != 0 && v != 1) return report;
  report.deterministic = true;
  if (!f.codomain().separates_points()) return report;
  std::vector<std::size_t> image(f.domain().point_count());
  for (std::size_t a = 0; a < f.rows(); ++a) {
    std::size_t target = 0;
    for (std::size_t c = 0; c < f.cols(); ++c)
      if (f.at(a, c) == 1) target = c;
    for (std::size_t p : f.domain().atom(a)) image[p] = f.codomain().atom(target).front();
  }
  report.witness = MeasurableFunction::make({f.domain(), f.codomain(), std::move(image)});
  return report;
}

/// The unique arrow X → 1.
inline StochasticKernel bang(const MeasurableSpace& space) {
  return StochasticKernel(space, terminal(), std::vector<Rational>(space.atom_count(), Rational(1)));
}

/// Q ∘ !: every row equals Q.
inline StochasticKernel constant_kernel(const MeasurableSpace& domain, const Probability& q) {
  std::vector<Rational> flat;
  flat.reserve(domain.atom_count() * q.space().atom_count());
  for (std::size_t a = 0; a < domain.atom_count(); ++a) flat.insert(flat.end(), q.weights().begin(), q.weights().end());
  return StochasticKernel(domain, q.space(), std::move(flat));
}

/// True iff all rows coincide, i.e. the kernel factors through 1.
inline bool is_independent(const StochasticKernel& h) {
  for (std::size_t r = 1; r < h.rows(); ++r)
    for (std::size_t c = 0; c < h.cols(); ++c)
      if (h.at(r, c) != h.at(0, c)) return false;
  return true;
}

/// hom(X, 2) ≅ measurable X → [0,1]: x ↦ f(x, {⊤}).
inline SimpleFunction kernel_to_unit_function(const StochasticKernel& f) {
  require_same_space(f.codomain(), two_point(), "kernel_to_unit_function: codomain is not 2");
  std::vector<Rational> per_atom(f.rows());
  for (std::size_t a = 0; a < f.rows(); ++a) per_atom[a] = f.at(a, 0);
  return SimpleFunction::from_atom_values(f.domain(), per_atom);
}

/// Inverse of kernel_to_unit_function; values must be atom-constant and in [0, 1].
inline StochasticKernel unit_function_to_kernel(const SimpleFunction& s) {
  const auto values = s.atom_values();
  std::vector<Rational> flat;
  flat.reserve(2 * values.size());
  for (const auto& v : values) {
    if (v < 0 || v > 1) throw Error(Errc::ValidationError, "value " + format_rational(v) + " is outside [0,1]");
    flat.push_back(v);
    flat.push_back(1 - v);
  }
  return StochasticKernel(s.space, two_point(), std::move(flat));
}

/// One line per domain atom: "row-label -> col: n/d, ...".
inline std::string to_string(const StochasticKernel& f) {
  std::string out;
  for (std::size_t r = 0; r < f.rows(); ++r) {
    out += f.domain().atom_label(r) + " -> " + to_string(f.row(r)) + "\n";
  }
  return out;
}

}  // namespace kb
