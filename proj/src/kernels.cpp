#include "mfk/kernels.hpp"

#include <cmath>

#include "mfk/errors.hpp"
#include "mfk/numeric.hpp"

namespace mfk {

namespace {

// Work below this many kernel evaluations stays on the calling thread.
constexpr Eigen::Index kParallelThreshold = 1 << 14;

void check_dims(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
}

void check_base_dim(const BaseKernelSpec& base, Eigen::Index d) {
  if (const auto* t = std::get_if<TableKernel>(&base.kind()); t && t->grid.rows() != d)
    throw Error(ErrorCode::DimensionMismatch, "table kernel grid dimension differs from input");
}

double row_term(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                Eigen::Index i, std::vector<double>& scratch) {
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    scratch[j] = nu.weight(j) * base.eval_unchecked(mu.atom(i), nu.atom(j));
  return mu.weight(i) * pairwise_sum(scratch);
}

}  // namespace

namespace serial {

double double_sum(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_dims(mu, nu);
  check_base_dim(base, mu.dim());
  std::vector<double> rows(static_cast<std::size_t>(mu.size()));
  std::vector<double> scratch(static_cast<std::size_t>(nu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) rows[i] = row_term(base, mu, nu, i, scratch);
  return pairwise_sum(rows);
}

}  // namespace serial

double eval_double_sum(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_dims(mu, nu);
  check_base_dim(base, mu.dim());
  const Eigen::Index n = mu.size();
  std::vector<double> rows(static_cast<std::size_t>(n));
#pragma omp parallel if (n * nu.size() >= kParallelThreshold)
  {
    std::vector<double> scratch(static_cast<std::size_t>(nu.size()));
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) rows[i] = row_term(base, mu, nu, i, scratch);
  }
  return pairwise_sum(rows);
}

double eval_pullback(const BaseKernelSpec& base, const FeatureMapSpec& fmap, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu) {
  check_dims(mu, nu);
  return base(fmap(mu), fmap(nu));
}

double kme_eval(const BaseKernelSpec& base, const DiscreteMeasure& mu, const Point& x) {
  if (mu.dim() != x.size()) throw Error(ErrorCode::DimensionMismatch, "point and measure differ in dimension");
  check_base_dim(base, x.size());
  return integrate(mu, [&](const auto& a) { return base.eval_unchecked(x, a); });
}

double mmd(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const double r = eval_double_sum(base, mu, mu) - 2.0 * eval_double_sum(base, mu, nu) +
                   eval_double_sum(base, nu, nu);
  if (r >= 0.0) return std::sqrt(r);
  if (r >= -1e-12) return 0.0;
  throw Error(ErrorCode::NegativeRadicand, "mmd radicand is negative; kernel is not PSD");
}

const BaseKernelSpec& DistributionKernelSpec::base() const {
  return std::visit([](const auto& k) -> const BaseKernelSpec& { return k.base; }, kind_);
}

double DistributionKernelSpec::operator()(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  if (const auto* d = std::get_if<DoubleSumFamily>(&kind_)) return eval_double_sum(d->base, mu, nu);
  const auto& p = std::get<PullbackFamily>(kind_);
  return eval_pullback(p.base, p.fmap, mu, nu);
}

double DistributionKernelSpec::operator()(const ParticleConfiguration& x,
                                          const ParticleConfiguration& y) const {
  return (*this)(empirical_measure(x), empirical_measure(y));
}

bool DistributionKernelSpec::operator==(const DistributionKernelSpec& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  if (const auto* d = std::get_if<DoubleSumFamily>(&kind_))
    return d->base == std::get<DoubleSumFamily>(other.kind_).base;
  const auto& a = std::get<PullbackFamily>(kind_);
  const auto& b = std::get<PullbackFamily>(other.kind_);
  return a.base == b.base && a.fmap == b.fmap;
}

}  // namespace mfk
