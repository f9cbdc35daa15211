#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernelbayes/bayes.hpp"
#include "kernelbayes/error.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/rational.hpp"

namespace kb {

/// Supply P_X, demand P_Y and a unit cost per pair of atoms (row-major, X by Y).
struct TransportProblem {
  Probability supply;
  Probability demand;
  std::vector<Rational> cost;

  std::size_t rows() const { return supply.space().atom_count(); }
  std::size_t cols() const { return demand.space().atom_count(); }
  const Rational& cost_at(std::size_t i, std::size_t j) const { return cost.at(i * cols() + j); }

  void validate() const {
    if (cost.size() != rows() * cols())
      throw Error(Errc::ValidationError, "cost matrix must be " + std::to_string(rows()) + "x" + std::to_string(cols()));
  }
};

struct TransportPlan {
  JointDistribution joint;
  Rational objective;
  /// Basic cells (row, column) of the final simplex basis; empty for plans built elsewhere.
  std::vector<std::pair<std::size_t, std::size_t>> basis;
};

inline Rational plan_cost(const TransportProblem& prob, const JointDistribution& j) {
  Rational total = 0;
  for (std::size_t i = 0; i < prob.rows(); ++i)
    for (std::size_t k = 0; k < prob.cols(); ++k) total += j.at(i, k) * prob.cost_at(i, k);
  return total;
}

namespace detail {

/// Basis tree of the transportation simplex. Nodes 0..m-1 are rows, m..m+n-1 columns.
class TransportBasis {
 public:
  TransportBasis(std::size_t m, std::size_t n) : m_(m), n_(n), in_(m * n, false) {}

  void add(std::size_t i, std::size_t j) { in_[i * n_ + j] = true; }
  void remove(std::size_t i, std::size_t j) { in_[i * n_ + j] = false; }
  bool contains(std::size_t i, std::size_t j) const { return in_[i * n_ + j]; }

  std::vector<std::pair<std::size_t, std::size_t>> cells() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (contains(i, j)) out.emplace_back(i, j);
    return out;
  }

  /// u_i + v_j = c_ij on basic cells, with u_0 = 0.
  void potentials(const TransportProblem& prob, std::vector<Rational>& u, std::vector<Rational>& v) const {
    std::vector<bool> have_u(m_, false), have_v(n_, false);
    u.assign(m_, Rational(0));
    v.assign(n_, Rational(0));
    have_u[0] = true;
    const auto basic = cells();
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto [i, j] : basic) {
        if (have_u[i] && !have_v[j]) {
          v[j] = prob.cost_at(i, j) - u[i];
          have_v[j] = progress = true;
        } else if (!have_u[i] && have_v[j]) {
          u[i] = prob.cost_at(i, j) - v[j];
          have_u[i] = progress = true;
        }
      }
    }
  }

  /// Tree path from column node j to row node i, as the sequence of basic cells.
  std::vector<std::pair<std::size_t, std::size_t>> path(std::size_t col, std::size_t row) const {
    const std::size_t nodes = m_ + n_;
    std::vector<std::optional<std::size_t>> parent(nodes);
    std::vector<bool> seen(nodes, false);
    std::vector<std::size_t> queue{m_ + col};
    seen[m_ + col] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      auto visit = [&](std::size_t next) {
        if (seen[next]) return;
        seen[next] = true;
        parent[next] = node;
        queue.push_back(next);
      };
      if (node < m_) {
        for (std::size_t j = 0; j < n_; ++j)
          if (contains(node, j)) visit(m_ + j);
      } else {
        for (std::size_t i = 0; i < m_; ++i)
          if (contains(i, node - m_)) visit(i);
      }
    }
    if (!seen[row]) throw Error(Errc::ValidationError, "transport basis is not a spanning tree");
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t node = row; node != m_ + col; node = *parent[node]) {
      const std::size_t prev = *parent[node];
      cells.push_back(node < m_ ? std::pair{node, prev - m_} : std::pair{prev, node - m_});
    }
    // Reverse so the path starts at the column end.
    return {cells.rbegin(), cells.rend()};
  }

 private:
  std::size_t m_, n_;
  std::vector<bool> in_;
};

}  // namespace detail

/// Primal transportation simplex over exact rationals: northwest-corner start,
/// Bland's rule for both the entering cell (first negative reduced cost in
/// row-major order) and the leaving cell (smallest index among ties).
inline TransportPlan solve_transport(const TransportProblem& prob) {
  prob.validate();
  const std::size_t m = prob.rows(), n = prob.cols();
  std::vector<Rational> x(m * n, Rational(0));
  detail::TransportBasis basis(m, n);

  {
    std::vector<Rational> s = prob.supply.weights(), d = prob.demand.weights();
    std::size_t i = 0, j = 0;
    while (true) {
      const Rational amount = s[i] < d[j] ? s[i] : d[j];
      x[i * n + j] = amount;
      basis.add(i, j);
      s[i] -= amount;
      d[j] -= amount;
      if (i + 1 == m && j + 1 == n) break;
      if (j + 1 == n || (i + 1 < m && s[i] == 0))
        ++i;
      else
        ++j;
    }
  }

  std::vector<Rational> u, v;
  while (true) {
    basis.potentials(prob, u, v);
    std::optional<std::pair<std::size_t, std::size_t>> entering;
    for (std::size_t i = 0; i < m && !entering; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!basis.contains(i, j) && prob.cost_at(i, j) - u[i] - v[j] < 0) {
          entering = std::pair{i, j};
          break;
        }
    if (!entering) break;

    const auto [ei, ej] = *entering;
    // Cycle: entering cell (+), then the tree path from column ej back to row ei,
    // whose cells alternate −, +, −, ...
    const auto path = basis.path(ej, ei);
    std::optional<std::size_t> leave;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const auto [i, j] = path[k];
      if (!leave) {
        leave = k;
        continue;
      }
      const auto [li, lj] = path[*leave];
      const auto& cur = x[i * n + j];
      const auto& best = x[li * n + lj];
      if (cur < best || (cur == best && i * n + j < li * n + lj)) leave = k;
    }
    const auto [li, lj] = path[*leave];
    const Rational theta = x[li * n + lj];
    x[ei * n + ej] += theta;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto [i, j] = path[k];
      if (k % 2 == 0)
        x[i * n + j] -= theta;
      else
        x[i * n + j] += theta;
    }
    basis.add(ei, ej);
    basis.remove(li, lj);
  }

  auto joint = JointDistribution::from_matrix(prob.supply.space(), prob.demand.space(), x);
  Rational objective = plan_cost(prob, joint);
  return {std::move(joint), std::move(objective), basis.cells()};
}

/// Dual potentials for a plan, recovered by shortest paths in the residual
/// graph: arcs row→column with cost c_ij always, column→row with cost −c_ij
/// wherever the plan ships mass.
struct OptimalityCertificate {
  bool optimal = false;
  std::vector<Rational> row_potentials;
  std::vector<Rational> column_potentials;
  Rational dual_objective;
};

inline OptimalityCertificate certify_plan(const TransportProblem& prob, const TransportPlan& plan) {
  prob.validate();
  require_same_space(plan.joint.x_space(), prob.supply.space(), "plan rows are not the supply space");
  require_same_space(plan.joint.y_space(), prob.demand.space(), "plan columns are not the demand space");
  if (!(marginal(plan.joint, Side::X) == prob.supply))
    throw Error(Errc::InfeasiblePlan, "plan does not reproduce the supply marginal");
  if (!(marginal(plan.joint, Side::Y) == prob.demand))
    throw Error(Errc::InfeasiblePlan, "plan does not reproduce the demand marginal");

  const std::size_t m = prob.rows(), n = prob.cols(), nodes = m + n;
  struct Arc {
    std::size_t from, to;
    Rational weight;
  };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      arcs.push_back({i, m + j, prob.cost_at(i, j)});
      if (plan.joint.at(i, j) > 0) arcs.push_back({m + j, i, -prob.cost_at(i, j)});
    }

  // Bellman-Ford from a virtual source joined to every node at distance 0.
  std::vector<Rational> dist(nodes, Rational(0));
  for (std::size_t round = 0; round + 1 < nodes; ++round) {
    bool changed = false;
    for (const auto& a : arcs)
      if (dist[a.from] + a.weight < dist[a.to]) {
        dist[a.to] = dist[a.from] + a.weight;
        changed = true;
      }
    if (!changed) break;
  }

  OptimalityCertificate cert;
  for (const auto& a : arcs)
    if (dist[a.from] + a.weight < dist[a.to]) return cert;  // negative cycle: an improving direction exists

  cert.row_potentials.resize(m);
  cert.column_potentials.resize(n);
  for (std::size_t i = 0; i < m; ++i) cert.row_potentials[i] = -dist[i];
  for (std::size_t j = 0; j < n; ++j) cert.column_potentials[j] = dist[m + j];

  // Check the certificate itself: dual feasibility and complementary slackness.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational reduced = prob.cost_at(i, j) - cert.row_potentials[i] - cert.column_potentials[j];
      if (reduced < 0) return cert;
      if (plan.joint.at(i, j) > 0 && reduced != 0) return cert;
    }
  cert.dual_objective = 0;
  for (std::size_t i = 0; i < m; ++i) cert.dual_objective += cert.row_potentials[i] * prob.supply.weight(i);
  for (std::size_t j = 0; j < n; ++j) cert.dual_objective += cert.column_potentials[j] * prob.demand.weight(j);
  cert.optimal = cert.dual_objective == plan_cost(prob, plan.joint) && plan.objective == cert.dual_objective;
  return cert;
}

/// True iff the plan is feasible and certified optimal. Throws InfeasiblePlan on marginal mismatch.
inline bool verify_plan(const TransportProblem& prob, const TransportPlan& plan) {
  return certify_plan(prob, plan).optimal;
}

}  // namespace kb
