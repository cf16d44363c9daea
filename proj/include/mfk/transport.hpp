#pragma once

#include <cstdint>
#include <utility>
#include <variant>

#include "mfk/base_kernel.hpp"
#include "mfk/measures.hpp"

namespace mfk {

struct EuclideanMetric {};

// d_k0(x, y) = |k0(., x) - k0(., y)| in the RKHS of k0.
struct KernelMetric {
  BaseKernelSpec base;
};

// Costs between nodes of a finite grid; inputs snap to the nearest node.
struct ExplicitMatrixMetric {
  Eigen::MatrixXd grid;   // dim x G
  Eigen::MatrixXd costs;  // G x G
};

/// Ground metric on X used to lift distances to measures.
class GroundMetric {
 public:
  using Kind = std::variant<EuclideanMetric, KernelMetric, ExplicitMatrixMetric>;

  GroundMetric() : kind_(EuclideanMetric{}) {}
  // Explicit matrices are checked for symmetry, zero diagonal, nonnegativity and,
  // on 1000 seeded random triples, the triangle inequality (slack 1e-10).
  explicit GroundMetric(Kind kind);

  static GroundMetric euclidean() { return GroundMetric(); }
  static GroundMetric kernel(const BaseKernelSpec& base) { return GroundMetric(KernelMetric{base}); }

  const Kind& kind() const { return kind_; }

  double operator()(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y) const;

  // rows: atoms of mu, cols: atoms of nu
  Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

 private:
  Kind kind_;
};

struct TransportPlan {
  Eigen::MatrixXd coupling;  // |supp mu| x |supp nu| after zero-weight atoms are dropped
  double cost = 0.0;
};

struct W1Result {
  double distance = 0.0;
  TransportPlan plan;
  // Kantorovich potentials of the optimal basis; sum u_i a_i + sum v_j b_j == distance.
  RealVector u;
  RealVector v;
  std::int64_t pivots = 0;
};

inline constexpr Eigen::Index kMaxExactSupport = 10000;

/// Exact W1 via the transportation simplex. Entering cell: lowest row-major
/// index with negative reduced cost; leaving cell: lowest index among ties.
W1Result w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  const GroundMetric& metric = GroundMetric());

double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct SinkhornResult {
  double cost = 0.0;  // <P_eps, C>
  double marginal_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kSinkhornMarginalTolerance = 1e-6;

SinkhornResult w1_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const GroundMetric& metric, double epsilon, int max_iters);

using MeasurePair = std::pair<DiscreteMeasure, DiscreteMeasure>;

// W1(first1, first2) + W1(second1, second2).
double dkr2(const MeasurePair& pair1, const MeasurePair& pair2,
            const GroundMetric& metric = GroundMetric());

inline constexpr Eigen::Index kMaxBruteForceSupport = 4;

/// Minimum cost over every basic feasible plan, found by enumerating all
/// spanning-tree bases of the bipartite support graph.
double w1_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const GroundMetric& metric = GroundMetric());

}  // namespace mfk
