#include "mfk/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mfk/errors.hpp"
#include "mfk/numeric.hpp"
#include "mfk/sampler.hpp"

namespace mfk {

namespace {

constexpr int kTriangleTriples = 1000;
constexpr double kTriangleSlack = 1e-10;

Eigen::Index snap_to(const Eigen::MatrixXd& grid, const Eigen::Ref<const Point>& x) {
  Eigen::Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index g = 0; g < grid.cols(); ++g) {
    const double d = (grid.col(g) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

void check_explicit(const ExplicitMatrixMetric& m) {
  const auto g = m.grid.cols();
  if (g < 1 || m.costs.rows() != g || m.costs.cols() != g)
    throw Error(ErrorCode::InvalidMetric, "explicit metric needs a G x G cost matrix over a nonempty grid");
  if (!m.costs.allFinite()) throw Error(ErrorCode::InvalidMetric, "explicit metric has non-finite costs");
  for (Eigen::Index i = 0; i < g; ++i) {
    if (m.costs(i, i) != 0.0) throw Error(ErrorCode::InvalidMetric, "explicit metric diagonal must be zero");
    for (Eigen::Index j = 0; j < g; ++j) {
      if (m.costs(i, j) < 0.0) throw Error(ErrorCode::InvalidMetric, "explicit metric has negative cost");
      if (m.costs(i, j) != m.costs(j, i)) throw Error(ErrorCode::InvalidMetric, "explicit metric is not symmetric");
    }
  }
  Rng rng = make_rng({0x7472u, static_cast<std::uint64_t>(g)});
  std::uniform_int_distribution<Eigen::Index> pick(0, g - 1);
  for (int t = 0; t < kTriangleTriples; ++t) {
    const auto i = pick(rng), j = pick(rng), k = pick(rng);
    if (m.costs(i, k) > m.costs(i, j) + m.costs(j, k) + kTriangleSlack)
      throw Error(ErrorCode::InvalidMetric, "explicit metric violates the triangle inequality");
  }
}

struct Prepared {
  Eigen::MatrixXd a_atoms, b_atoms;
  RealVector a, b;
};

Prepared prepare(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
  const auto mu2 = mu.without_zero_weights();
  const auto nu2 = nu.without_zero_weights();
  return {mu2.atoms(), nu2.atoms(), mu2.weights(), nu2.weights()};
}

double plan_cost(const Eigen::MatrixXd& plan, const Eigen::MatrixXd& cost) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(plan.size()));
  for (Eigen::Index j = 0; j < plan.cols(); ++j)
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
      if (plan(i, j) != 0.0) terms.push_back(plan(i, j) * cost(i, j));
  return pairwise_sum(terms);
}

struct Cell {
  Eigen::Index row, col;
  double flow;
};

// Tree bookkeeping for the transportation simplex. Nodes 0..n-1 are sources,
// n..n+m-1 sinks; every basic cell is an edge.
class BasisTree {
 public:
  BasisTree(Eigen::Index n, Eigen::Index m) : n_(n), m_(m), adj_(static_cast<std::size_t>(n + m)) {}

  void rebuild(const std::vector<Cell>& cells) {
    for (auto& a : adj_) a.clear();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      adj_[cells[k].row].push_back(k);
      adj_[n_ + cells[k].col].push_back(k);
    }
  }

  void potentials(const std::vector<Cell>& cells, const Eigen::MatrixXd& cost, RealVector& u,
                  RealVector& v) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<Eigen::Index> stack{0};
    u.setZero(n_);
    v.setZero(m_);
    seen[0] = 1;
    while (!stack.empty()) {
      const auto node = stack.back();
      stack.pop_back();
      for (auto k : adj_[node]) {
        const auto& c = cells[k];
        const auto other = node < n_ ? n_ + c.col : c.row;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node < n_)
          v[c.col] = cost(c.row, c.col) - u[c.row];
        else
          u[c.row] = cost(c.row, c.col) - v[c.col];
        stack.push_back(other);
      }
    }
  }

  // Cells on the tree path from `from` to `to`, ordered starting at `from`.
  std::vector<std::size_t> path(const std::vector<Cell>& cells, Eigen::Index from, Eigen::Index to) const {
    std::vector<std::ptrdiff_t> parent_cell(adj_.size(), -1);
    std::vector<char> seen(adj_.size(), 0);
    std::vector<Eigen::Index> queue{to};
    seen[to] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const auto node = queue[h];
      if (node == from) break;
      for (auto k : adj_[node]) {
        const auto& c = cells[k];
        const auto other = node < n_ ? n_ + c.col : c.row;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_cell[other] = static_cast<std::ptrdiff_t>(k);
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> out;
    for (auto node = from; node != to;) {
      const auto k = static_cast<std::size_t>(parent_cell[node]);
      out.push_back(k);
      const auto& c = cells[k];
      node = node < n_ ? n_ + c.col : c.row;
    }
    return out;
  }

 private:
  Eigen::Index n_, m_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace

GroundMetric::GroundMetric(Kind kind) : kind_(std::move(kind)) {
  if (const auto* m = std::get_if<ExplicitMatrixMetric>(&kind_)) check_explicit(*m);
}

double GroundMetric::operator()(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y) const {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "metric arguments differ in dimension");
  if (std::holds_alternative<EuclideanMetric>(kind_)) return (x - y).norm();
  if (const auto* k = std::get_if<KernelMetric>(&kind_)) return kernel_metric(k->base, x, y);
  const auto& m = std::get<ExplicitMatrixMetric>(kind_);
  if (m.grid.rows() != x.size()) throw Error(ErrorCode::DimensionMismatch, "metric grid dimension differs");
  return m.costs(snap_to(m.grid, x), snap_to(m.grid, y));
}

Eigen::MatrixXd GroundMetric::cost_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "atom sets differ in dimension");
  Eigen::MatrixXd c(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) c(i, j) = (*this)(a.col(i), b.col(j));
  return c;
}

W1Result w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& metric) {
  const Prepared p = prepare(mu, nu);
  const Eigen::Index n = p.a.size(), m = p.b.size();
  if (n + m > kMaxExactSupport) {
    std::ostringstream msg;
    msg << "combined support " << n + m << " exceeds " << kMaxExactSupport;
    throw Error(ErrorCode::SupportTooLarge, msg.str());
  }
  const Eigen::MatrixXd cost = metric.cost_matrix(p.a_atoms, p.b_atoms);
  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;

  // Northwest-corner start: n + m - 1 cells forming a spanning tree.
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n + m - 1));
  {
    RealVector ra = p.a, rb = p.b;
    Eigen::Index i = 0, j = 0;
    for (;;) {
      const double x = std::max(0.0, std::min(ra[i], rb[j]));
      cells.push_back({i, j, x});
      ra[i] -= x;
      rb[j] -= x;
      if (i == n - 1 && j == m - 1) break;
      if (j == m - 1 || (i < n - 1 && ra[i] <= rb[j]))
        ++i;
      else
        ++j;
    }
  }

  std::vector<char> basic(static_cast<std::size_t>(n * m), 0);
  for (const auto& c : cells) basic[c.row * m + c.col] = 1;

  BasisTree tree(n, m);
  RealVector u, v;
  std::int64_t pivots = 0;
  for (;;) {
    tree.rebuild(cells);
    tree.potentials(cells, cost, u, v);

    Eigen::Index ei = -1, ej = -1;
    for (Eigen::Index i = 0; i < n && ei < 0; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (basic[i * m + j]) continue;
        if (cost(i, j) - u[i] - v[j] < -tol) {
          ei = i;
          ej = j;
          break;
        }
      }
    }
    if (ei < 0) break;

    // Cycle: entering cell (+), then the tree path from sink ej back to source ei,
    // alternating -, +, -, ...
    const auto path = tree.path(cells, n + ej, ei);
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) theta = std::min(theta, cells[path[k]].flow);
    std::size_t leave = path[0];
    Eigen::Index leave_index = std::numeric_limits<Eigen::Index>::max();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const auto& c = cells[path[k]];
      const auto idx = c.row * m + c.col;
      if (c.flow == theta && idx < leave_index) {
        leave_index = idx;
        leave = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      auto& c = cells[path[k]];
      c.flow = (k % 2 == 0) ? std::max(0.0, c.flow - theta) : c.flow + theta;
    }
    basic[cells[leave].row * m + cells[leave].col] = 0;
    cells[leave] = {ei, ej, theta};
    basic[ei * m + ej] = 1;
    ++pivots;
  }

  W1Result out;
  out.plan.coupling = Eigen::MatrixXd::Zero(n, m);
  for (const auto& c : cells) out.plan.coupling(c.row, c.col) = c.flow;
  out.plan.cost = plan_cost(out.plan.coupling, cost);
  out.distance = out.plan.cost;
  out.u = u;
  out.v = v;
  out.pivots = pivots;
  return out;
}

double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw Error(ErrorCode::DimensionNotOne, "w1_1d needs d = 1");
  std::vector<std::pair<double, double>> events;
  events.reserve(static_cast<std::size_t>(mu.size() + nu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) events.emplace_back(mu.atoms()(0, i), mu.weight(i));
  for (Eigen::Index j = 0; j < nu.size(); ++j) events.emplace_back(nu.atoms()(0, j), -nu.weight(j));
  std::sort(events.begin(), events.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  // integral of |F_mu - F_nu| over the real line
  std::vector<double> terms;
  double diff = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    diff += events[k].second;
    const double width = events[k + 1].first - events[k].first;
    if (width > 0.0) terms.push_back(std::abs(diff) * width);
  }
  return pairwise_sum(terms);
}

SinkhornResult w1_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& metric,
                           double epsilon, int max_iters) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "sinkhorn epsilon must be positive");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "sinkhorn needs max_iters >= 1");
  const Prepared p = prepare(mu, nu);
  const Eigen::Index n = p.a.size(), m = p.b.size();
  const Eigen::MatrixXd cost = metric.cost_matrix(p.a_atoms, p.b_atoms);
  const RealVector log_a = p.a.array().log();
  const RealVector log_b = p.b.array().log();

  RealVector f = RealVector::Zero(n), g = RealVector::Zero(m);
  auto lse = [](const auto& values) {
    const double mx = values.maxCoeff();
    return mx + std::log((values.array() - mx).exp().sum());
  };

  SinkhornResult out;
  RealVector tmp_n(n), tmp_m(m);
  for (int it = 1; it <= max_iters; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) tmp_m[j] = (g[j] - cost(i, j)) / epsilon;
      f[i] = epsilon * (log_a[i] - lse(tmp_m));
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) tmp_n[i] = (f[i] - cost(i, j)) / epsilon;
      g[j] = epsilon * (log_b[j] - lse(tmp_n));
    }
    // Columns are exact after the g-update; measure the row violation.
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) row += std::exp((f[i] + g[j] - cost(i, j)) / epsilon);
      err += std::abs(row - p.a[i]);
    }
    out.iterations = it;
    out.marginal_error = err;
    if (err <= kSinkhornMarginalTolerance) {
      out.converged = true;
      break;
    }
  }
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n * m));
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      terms.push_back(std::exp((f[i] + g[j] - cost(i, j)) / epsilon) * cost(i, j));
  out.cost = pairwise_sum(terms);
  return out;
}

double dkr2(const MeasurePair& pair1, const MeasurePair& pair2, const GroundMetric& metric) {
  return w1_exact(pair1.first, pair2.first, metric).distance +
         w1_exact(pair1.second, pair2.second, metric).distance;
}

double w1_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& metric) {
  const Prepared p = prepare(mu, nu);
  const Eigen::Index n = p.a.size(), m = p.b.size();
  if (n > kMaxBruteForceSupport || m > kMaxBruteForceSupport)
    throw Error(ErrorCode::SupportTooLargeForBruteForce, "brute force supports at most 4 x 4 atoms");
  const Eigen::MatrixXd cost = metric.cost_matrix(p.a_atoms, p.b_atoms);
  const int cells = static_cast<int>(n * m);
  const int basis_size = static_cast<int>(n + m - 1);
  const int nodes = static_cast<int>(n + m);

  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (std::popcount(mask) != basis_size) continue;
    // acyclic check with union-find
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool tree = true;
    std::vector<std::pair<int, int>> edges;
    for (int c = 0; c < cells && tree; ++c) {
      if (!(mask & (1u << c))) continue;
      const int i = c / static_cast<int>(m), j = static_cast<int>(n) + c % static_cast<int>(m);
      const int ri = find(i), rj = find(j);
      if (ri == rj) tree = false;
      parent[ri] = rj;
      edges.emplace_back(i, j);
    }
    if (!tree) continue;

    // Leaf elimination determines the unique flow on the tree.
    std::vector<double> supply(nodes);
    for (Eigen::Index i = 0; i < n; ++i) supply[i] = p.a[i];
    for (Eigen::Index j = 0; j < m; ++j) supply[n + j] = p.b[j];
    std::vector<int> degree(nodes, 0);
    for (auto [i, j] : edges) {
      ++degree[i];
      ++degree[j];
    }
    std::vector<double> flow(edges.size(), 0.0);
    std::vector<char> done(edges.size(), 0);
    for (std::size_t step = 0; step < edges.size(); ++step) {
      std::size_t pick = edges.size();
      int leaf = -1;
      for (std::size_t e = 0; e < edges.size() && pick == edges.size(); ++e) {
        if (done[e]) continue;
        if (degree[edges[e].first] == 1) {
          pick = e;
          leaf = edges[e].first;
        } else if (degree[edges[e].second] == 1) {
          pick = e;
          leaf = edges[e].second;
        }
      }
      const int other = leaf == edges[pick].first ? edges[pick].second : edges[pick].first;
      flow[pick] = supply[leaf];
      supply[other] -= supply[leaf];
      supply[leaf] = 0.0;
      --degree[leaf];
      --degree[other];
      done[pick] = 1;
    }
    bool feasible = true;
    std::vector<double> terms;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (flow[e] < -1e-12) feasible = false;
      terms.push_back(std::max(0.0, flow[e]) * cost(edges[e].first, edges[e].second - n));
    }
    if (feasible) best = std::min(best, pairwise_sum(terms));
  }
  return best;
}

}  // namespace mfk
