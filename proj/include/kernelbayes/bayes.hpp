#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kernelbayes/error.hpp"
#include "kernelbayes/kernel.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/rational.hpp"
#include "kernelbayes/space.hpp"

namespace kb {

enum class Side { X, Y };

/// Which conditional to extract from a joint on X × Y.
enum class Conditional {
  XGivenY,  // kernel Y → X
  YGivenX,  // kernel X → Y
};

/// A probability measure on X × Y, kept together with its factor spaces.
class JointDistribution {
 public:
  JointDistribution(MeasurableSpace x, MeasurableSpace y, Probability joint)
      : product_(std::move(x), std::move(y)), joint_(std::move(joint)) {
    require_same_space(joint_.space(), product_.space(), "joint measure is not on X × Y");
  }

  /// Row-major weights indexed by (atom of X, atom of Y).
  static JointDistribution from_matrix(const MeasurableSpace& x, const MeasurableSpace& y, std::vector<Rational> weights) {
    ProductSpace p(x, y);
    return JointDistribution(x, y, Probability(p.space(), std::move(weights)));
  }

  const MeasurableSpace& x_space() const { return product_.left(); }
  const MeasurableSpace& y_space() const { return product_.right(); }
  const ProductSpace& product() const { return product_; }
  const Probability& joint() const { return joint_; }
  const Rational& at(std::size_t a, std::size_t b) const { return joint_.weight(product_.atom_index(a, b)); }

  /// The same measure viewed on Y × X.
  JointDistribution transpose() const {
    const std::size_t n = x_space().atom_count(), m = y_space().atom_count();
    std::vector<Rational> w(n * m);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < m; ++b) w[b * n + a] = at(a, b);
    return from_matrix(y_space(), x_space(), std::move(w));
  }

  friend bool operator==(const JointDistribution& l, const JointDistribution& r) {
    return l.x_space() == r.x_space() && l.y_space() == r.y_space() && l.joint_ == r.joint_;
  }

 private:
  ProductSpace product_;
  Probability joint_;
};

/// J_h(A × B) = ∫_A h_B dP.
inline JointDistribution joint_from_prior(const Probability& p, const StochasticKernel& h) {
  require_same_space(h.domain(), p.space(), "joint_from_prior: kernel domain is not the prior's space");
  const std::size_t n = h.rows(), m = h.cols();
  std::vector<Rational> w(n * m);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < m; ++b) w[a * m + b] = p.weight(a) * h.at(a, b);
  return JointDistribution::from_matrix(p.space(), h.codomain(), std::move(w));
}

/// Pushforward of the joint along a projection.
inline Probability marginal(const JointDistribution& j, Side side) {
  return pushforward(side == Side::X ? j.product().proj_left() : j.product().proj_right(), j.joint());
}

/// P_X = k ∘ P_Y and P_Y = h ∘ P_X, both exactly.
inline bool check_compatibility(const Probability& px, const Probability& py, const StochasticKernel& h,
                                const StochasticKernel& k) {
  require_same_space(h.domain(), px.space(), "compatibility: h must start at P_X's space");
  require_same_space(h.codomain(), py.space(), "compatibility: h must end at P_Y's space");
  require_same_space(k.domain(), py.space(), "compatibility: k must start at P_Y's space");
  require_same_space(k.codomain(), px.space(), "compatibility: k must end at P_X's space");
  return apply(k, py) == px && apply(h, px) == py;
}

/// J_h = J_k as measures on X × Y, with J_k built on Y × X and transposed.
/// This implies check_compatibility but is strictly stronger.
inline bool joints_agree(const Probability& px, const Probability& py, const StochasticKernel& h,
                         const StochasticKernel& k) {
  return joint_from_prior(px, h) == joint_from_prior(py, k).transpose();
}

/// Regular conditional probability of a joint. On atoms where the conditioning
/// marginal vanishes the row is set to the other marginal.
inline StochasticKernel disintegrate(const JointDistribution& j, Conditional target) {
  if (target == Conditional::YGivenX) return disintegrate(j.transpose(), Conditional::XGivenY);
  const auto px = marginal(j, Side::X);
  const auto py = marginal(j, Side::Y);
  const std::size_t n = j.x_space().atom_count(), m = j.y_space().atom_count();
  std::vector<Rational> flat(m * n);
  for (std::size_t b = 0; b < m; ++b) {
    const auto& mass = py.weight(b);
    for (std::size_t a = 0; a < n; ++a) flat[b * n + a] = mass == 0 ? px.weight(a) : Rational(j.at(a, b) / mass);
  }
  return StochasticKernel(j.y_space(), j.x_space(), std::move(flat));
}

/// Disintegration that factors through the product. For XGivenY the result is
/// φ: Y → X × Y with φ(y, A × B) = J(A × (B ∩ y)) / P_Y(y); for YGivenX it is
/// γ: X → X × Y, symmetrically. Null rows use the other marginal times the point mass.
inline StochasticKernel disintegrate_strong(const JointDistribution& j, Conditional target = Conditional::XGivenY) {
  const auto& prod = j.product();
  const std::size_t n = j.x_space().atom_count(), m = j.y_space().atom_count();
  const std::size_t cells = n * m;
  if (target == Conditional::XGivenY) {
    const auto cond = disintegrate(j, Conditional::XGivenY);
    std::vector<Rational> flat(m * cells, Rational(0));
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t a = 0; a < n; ++a) flat[b * cells + prod.atom_index(a, b)] = cond.at(b, a);
    return StochasticKernel(j.y_space(), prod.space(), std::move(flat));
  }
  const auto cond = disintegrate(j, Conditional::YGivenX);
  std::vector<Rational> flat(n * cells, Rational(0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < m; ++b) flat[a * cells + prod.atom_index(a, b)] = cond.at(a, b);
  return StochasticKernel(j.x_space(), prod.space(), std::move(flat));
}

/// f = g almost everywhere: rows differ only on P-null atoms.
inline bool ae_equal(const StochasticKernel& f, const StochasticKernel& g, const Probability& p) {
  require_same_space(f.domain(), g.domain(), "ae_equal: kernels have different domains");
  require_same_space(f.codomain(), g.codomain(), "ae_equal: kernels have different codomains");
  require_same_space(p.space(), f.domain(), "ae_equal: measure is not on the kernels' domain");
  for (std::size_t r = 0; r < f.rows(); ++r) {
    if (p.weight(r) == 0) continue;
    for (std::size_t c = 0; c < f.cols(); ++c)
      if (f.at(r, c) != g.at(r, c)) return false;
  }
  return true;
}

/// Prior on hypotheses H and a sampling kernel H → D.
class BayesModel {
 public:
  BayesModel(Probability prior, StochasticKernel sampling) : prior_(std::move(prior)), sampling_(std::move(sampling)) {
    require_same_space(sampling_.domain(), prior_.space(), "sampling kernel must start at the hypothesis space");
  }

  const MeasurableSpace& hypotheses() const { return prior_.space(); }
  const MeasurableSpace& data() const { return sampling_.codomain(); }
  const Probability& prior() const { return prior_; }
  const StochasticKernel& sampling() const { return sampling_; }

 private:
  Probability prior_;
  StochasticKernel sampling_;
};

struct InferenceResult {
  StochasticKernel inference;  // D → H
  Probability data_prior;      // P_D = 𝒮 ∘ P_H
};

/// The inference map ℐ: D → H, the disintegration of the model's joint over D.
inline InferenceResult inference(const BayesModel& model) {
  const auto joint = joint_from_prior(model.prior(), model.sampling());
  return {disintegrate(joint, Conditional::XGivenY), marginal(joint, Side::Y)};
}

/// ℐ ∘ μ. Requires μ ≪ P_D, otherwise the answer would depend on the
/// arbitrary completion of ℐ on P_D-null atoms.
inline Probability posterior(const InferenceResult& res, const Probability& measurement) {
  require_same_space(measurement.space(), res.data_prior.space(), "measurement is not on the data space");
  if (!is_absolutely_continuous(measurement, res.data_prior))
    throw Error(Errc::MeasurementNotAbsolutelyContinuous, "measurement charges an atom of zero predictive probability");
  return apply(res.inference, measurement);
}

/// Produces the sampling kernel for the next step from the step index, the
/// freshly updated prior and the current sampling kernel.
using Resample = std::function<StochasticKernel(std::size_t step, const Probability& prior, const StochasticKernel& sampling)>;

/// Sequential updating: each posterior becomes the next prior, and the
/// inference map is re-derived from the new joint at every step.
inline std::vector<Probability> update_loop(const BayesModel& model, const std::vector<Probability>& measurements,
                                            const Resample& resample = {}) {
  std::vector<Probability> out;
  out.reserve(measurements.size());
  Probability prior = model.prior();
  StochasticKernel sampling = model.sampling();
  for (std::size_t step = 0; step < measurements.size(); ++step) {
    const auto res = inference(BayesModel(prior, sampling));
    try {
      prior = posterior(res, measurements[step]);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(step) + ": " + e.message(), step);
    }
    out.push_back(prior);
    if (resample) sampling = resample(step, prior, sampling);
  }
  return out;
}

struct TonelliResult {
  Rational via_x;      // ∫_X (F̄ ∘ γ) dP_X
  Rational via_joint;  // ∫_{X×Y} F dJ
  Rational via_y;      // ∫_Y (F̄ ∘ φ) dP_Y
};

/// Integrates F: X × Y → [0,1] three ways through the strong disintegrations.
inline TonelliResult tonelli_check(const JointDistribution& j, const SimpleFunction& f) {
  require_same_space(f.space, j.product().space(), "tonelli_check: F is not defined on X × Y");
  const auto f_bar = unit_function_to_kernel(f);
  const auto gamma = disintegrate_strong(j, Conditional::YGivenX);
  const auto phi = disintegrate_strong(j, Conditional::XGivenY);
  const auto along_x = kernel_to_unit_function(compose(f_bar, gamma));
  const auto along_y = kernel_to_unit_function(compose(f_bar, phi));
  return {integrate(along_x, marginal(j, Side::X)), integrate(f, j.joint()), integrate(along_y, marginal(j, Side::Y))};
}

}  // namespace kb
