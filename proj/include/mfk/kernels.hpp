#pragma once

#include <variant>

#include "mfk/base_kernel.hpp"
#include "mfk/feature_map.hpp"
#include "mfk/measures.hpp"

namespace mfk {

// k(mu, nu) = sum_ij w_i v_j k0(a_i, b_j); (1/M^2) double sum on configurations.
struct DoubleSumFamily {
  BaseKernelSpec base;
};

// k(mu, nu) = k0(phi(mu), phi(nu)).
struct PullbackFamily {
  BaseKernelSpec base;
  FeatureMapSpec fmap;
};

/// Kernel family on measures; its configuration-level kernel k^[M] is the
/// evaluation on empirical measures. Bounded by C_k = C_k0.
class DistributionKernelSpec {
 public:
  using Kind = std::variant<DoubleSumFamily, PullbackFamily>;

  explicit DistributionKernelSpec(Kind kind) : kind_(std::move(kind)) {}

  static DistributionKernelSpec double_sum(const BaseKernelSpec& base) {
    return DistributionKernelSpec(DoubleSumFamily{base});
  }
  static DistributionKernelSpec pullback(const BaseKernelSpec& base, const FeatureMapSpec& fmap) {
    return DistributionKernelSpec(PullbackFamily{base, fmap});
  }

  const Kind& kind() const { return kind_; }
  const BaseKernelSpec& base() const;
  double bound() const { return base().bound(); }
  bool is_double_sum() const { return std::holds_alternative<DoubleSumFamily>(kind_); }

  double operator()(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
  double operator()(const ParticleConfiguration& x, const ParticleConfiguration& y) const;

  bool operator==(const DistributionKernelSpec& other) const;

 private:
  Kind kind_;
};

double eval_double_sum(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double eval_pullback(const BaseKernelSpec& base, const FeatureMapSpec& fmap, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu);

// Kernel mean embedding f_mu(x) = sum_i w_i k0(x, a_i).
double kme_eval(const BaseKernelSpec& base, const DiscreteMeasure& mu, const Point& x);

// RKHS distance between kernel mean embeddings.
double mmd(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

namespace serial {

// Reference double sum with the same summation tree, always single-threaded.
double double_sum(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace serial

}  // namespace mfk
