#pragma once

#include <vector>

#include "mfk/kernels.hpp"

namespace mfk {

struct GramMatrix {
  Eigen::MatrixXd entries;
  std::vector<DiscreteMeasure> centers;
};

// Entries computed once per unordered pair, in parallel over pairs.
GramMatrix gram(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& centers);
// Cross-kernel matrix K(i, j) = k(rows_i, cols_j).
Eigen::MatrixXd cross_gram(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& rows,
                           const std::vector<DiscreteMeasure>& cols);

namespace serial {
GramMatrix gram(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& centers);
}

struct PsdResult {
  double min_eigenvalue;
  bool pass;
};

// pass iff min eigenvalue >= -tol * max(1, trace). Throws NonSymmetricInput
// when entries differ from their transpose by more than 1e-12.
PsdResult psd_check(const Eigen::MatrixXd& g, double tol);
inline PsdResult psd_check(const GramMatrix& g, double tol) { return psd_check(g.entries, tol); }

/// Finite RKHS element sum_n alpha_n k(., center_n).
struct Expansion {
  std::vector<DiscreteMeasure> centers;
  RealVector coefficients;
  DistributionKernelSpec kernel;

  Expansion(std::vector<DiscreteMeasure> centers, RealVector coefficients, DistributionKernelSpec kernel);

  // k(., mu) with unit coefficient.
  static Expansion section(const DistributionKernelSpec& kernel, const DiscreteMeasure& mu);
};

double expansion_eval(const Expansion& f, const DiscreteMeasure& input);
double expansion_inner(const Expansion& f, const Expansion& g);
double rkhs_norm(const Expansion& f);

struct RidgeFit {
  Expansion model;
  double lambda;
  double jitter;    // added to lambda on the diagonal scale, 0 when the first attempt succeeded
  double residual;  // |(K + (lambda + jitter) N I) alpha - y|
};

/// Solves (K + lambda N I) alpha = y by Cholesky. On failure the effective
/// lambda escalates through lambda + {1e-12, 1e-10, 1e-8} * trace / N.
RidgeFit ridge_fit(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& centers,
                   const RealVector& targets, double lambda);

struct SupBoundResult {
  double max_abs;
  double bound;
  bool pass;
};

// bound = |f|_H sqrt(C_k); pass iff max |f(probe)| <= bound + 1e-9.
SupBoundResult sup_bound_check(const Expansion& f, double c_k, const std::vector<DiscreteMeasure>& probes);

}  // namespace mfk
