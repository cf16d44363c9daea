#include "mfk/rkhs.hpp"

#include <cmath>
#include <sstream>

#include "mfk/errors.hpp"
#include "mfk/numeric.hpp"
#include "mfk/parallel.hpp"

namespace mfk {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kNormClamp = 1e-10;
constexpr double kResidualTolerance = 1e-8;

void check_same_dim(const std::vector<DiscreteMeasure>& centers) {
  for (const auto& c : centers)
    if (c.dim() != centers.front().dim())
      throw Error(ErrorCode::DimensionMismatch, "centers differ in dimension");
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> upper_pairs(Eigen::Index n) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  out.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) out.emplace_back(i, j);
  return out;
}

}  // namespace

GramMatrix gram(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& centers) {
  if (centers.empty()) throw Error(ErrorCode::InvalidArgument, "gram needs at least one center");
  check_same_dim(centers);
  const auto n = static_cast<Eigen::Index>(centers.size());
  const auto pairs = upper_pairs(n);
  Eigen::MatrixXd k(n, n);
  parallel_for(static_cast<std::ptrdiff_t>(pairs.size()), [&](std::ptrdiff_t p) {
    const auto [i, j] = pairs[p];
    k(i, j) = kernel(centers[i], centers[j]);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) k(j, i) = k(i, j);
  return {std::move(k), centers};
}

namespace serial {
GramMatrix gram(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& centers) {
  if (centers.empty()) throw Error(ErrorCode::InvalidArgument, "gram needs at least one center");
  check_same_dim(centers);
  const auto n = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) k(i, j) = k(j, i) = kernel(centers[i], centers[j]);
  return {std::move(k), centers};
}
}  // namespace serial

Eigen::MatrixXd cross_gram(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& rows,
                           const std::vector<DiscreteMeasure>& cols) {
  const auto n = static_cast<Eigen::Index>(rows.size()), m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd k(n, m);
  parallel_for(static_cast<std::ptrdiff_t>(n * m), [&](std::ptrdiff_t p) {
    const auto i = p / m, j = p % m;
    k(i, j) = kernel(rows[i], cols[j]);
  });
  return k;
}

PsdResult psd_check(const Eigen::MatrixXd& g, double tol) {
  if (g.rows() != g.cols() || g.rows() == 0) throw Error(ErrorCode::NonSymmetricInput, "gram matrix must be square");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw Error(ErrorCode::NonSymmetricInput, "gram matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  return {min_eig, min_eig >= -tol * std::max(1.0, g.trace())};
}

Expansion::Expansion(std::vector<DiscreteMeasure> c, RealVector a, DistributionKernelSpec k)
    : centers(std::move(c)), coefficients(std::move(a)), kernel(std::move(k)) {
  if (centers.empty() || static_cast<Eigen::Index>(centers.size()) != coefficients.size())
    throw Error(ErrorCode::InvalidArgument, "expansion needs as many coefficients as centers (>= 1)");
  check_same_dim(centers);
}

Expansion Expansion::section(const DistributionKernelSpec& kernel, const DiscreteMeasure& mu) {
  return Expansion({mu}, RealVector::Ones(1), kernel);
}

double expansion_eval(const Expansion& f, const DiscreteMeasure& input) {
  if (input.dim() != f.centers.front().dim())
    throw Error(ErrorCode::DimensionMismatch, "input dimension differs from expansion centers");
  std::vector<double> terms(f.centers.size());
  for (std::size_t n = 0; n < f.centers.size(); ++n)
    terms[n] = f.coefficients[static_cast<Eigen::Index>(n)] * f.kernel(input, f.centers[n]);
  return pairwise_sum(terms);
}

double expansion_inner(const Expansion& f, const Expansion& g) {
  if (!(f.kernel == g.kernel)) throw Error(ErrorCode::KernelSpecMismatch, "expansions use different kernels");
  if (f.centers.front().dim() != g.centers.front().dim())
    throw Error(ErrorCode::DimensionMismatch, "expansions differ in dimension");
  const Eigen::MatrixXd k = cross_gram(f.kernel, g.centers, f.centers);  // k(c_m^g, c_n^f)
  std::vector<double> terms(f.centers.size());
  for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(f.centers.size()); ++n) {
    std::vector<double> row(g.centers.size());
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(g.centers.size()); ++m)
      row[m] = g.coefficients[m] * k(m, n);
    terms[n] = f.coefficients[n] * pairwise_sum(row);
  }
  return pairwise_sum(terms);
}

double rkhs_norm(const Expansion& f) {
  const double sq = expansion_inner(f, f);
  if (sq >= 0.0) return std::sqrt(sq);
  if (sq >= -kNormClamp) return 0.0;
  std::ostringstream msg;
  msg << "squared RKHS norm is " << sq << "; kernel is not PSD";
  throw Error(ErrorCode::NegativeSquaredNorm, msg.str());
}

RidgeFit ridge_fit(const DistributionKernelSpec& kernel, const std::vector<DiscreteMeasure>& centers,
                   const RealVector& targets, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (static_cast<Eigen::Index>(centers.size()) != targets.size())
    throw Error(ErrorCode::DimensionMismatch, "targets and centers differ in length");
  const auto k = gram(kernel, centers).entries;
  const auto n = k.rows();
  const double scale = k.trace() / static_cast<double>(n);
  const double y_norm = targets.norm();
  for (const double jitter : {0.0, 1e-12 * scale, 1e-10 * scale, 1e-8 * scale}) {
    const double lam = lambda + jitter;
    Eigen::MatrixXd a = k;
    a.diagonal().array() += lam * static_cast<double>(n);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    RealVector alpha = llt.solve(targets);
    const double residual = (a * alpha - targets).norm();
    if (!alpha.allFinite() || residual > kResidualTolerance * std::max(y_norm, 1e-300)) {
      if (y_norm == 0.0 && alpha.allFinite()) {
        // y = 0 admits alpha = 0 exactly
      } else {
        continue;
      }
    }
    return {Expansion(centers, std::move(alpha), kernel), lambda, jitter, residual};
  }
  throw Error(ErrorCode::SingularSystem, "ridge system is singular after jitter escalation");
}

SupBoundResult sup_bound_check(const Expansion& f, double c_k, const std::vector<DiscreteMeasure>& probes) {
  if (probes.empty()) throw Error(ErrorCode::InvalidArgument, "sup_bound_check needs probes");
  std::vector<double> vals(probes.size());
  parallel_for(static_cast<std::ptrdiff_t>(probes.size()),
               [&](std::ptrdiff_t p) { vals[p] = std::abs(expansion_eval(f, probes[p])); });
  double max_abs = 0.0;
  for (double v : vals) max_abs = std::max(max_abs, v);
  const double bound = rkhs_norm(f) * std::sqrt(c_k);
  return {max_abs, bound, max_abs <= bound + 1e-9};
}

}  // namespace mfk
