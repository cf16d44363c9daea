#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "mfk/base_kernel.hpp"
#include "mfk/feature_map.hpp"
#include "mfk/sampler.hpp"

namespace mfk::quad {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

struct UniformMarginal {
  double lo, hi;
};
struct TruncatedNormalMarginal {
  double mean, sd, lo, hi;
};
struct AtomMarginal {
  double at;
};
using Marginal = std::variant<UniformMarginal, TruncatedNormalMarginal, AtomMarginal>;

// One product-measure component of a sampler's law.
struct ProductComponent {
  double weight;
  std::vector<Marginal> marginals;  // one per coordinate
};

std::vector<ProductComponent> population(const SamplerSpec& sampler);

inline constexpr int kStartNodes = 64;
inline constexpr int kMaxNodes = 1024;
inline constexpr double kAgreement = 1e-10;

// E[f(X)] and E[g(X, Y)] for independent X ~ a, Y ~ b. The node count doubles
// from 64 until two successive rules agree to 1e-10 (relative to max(1, |value|)).
double expect(const Marginal& a, const std::function<double(double)>& f);
double expect2(const Marginal& a, const Marginal& b, const std::function<double(double, double)>& g);

/// Population value of the double-sum kernel, iint k0 dmu dnu, for a Gaussian k0.
/// The Gaussian factorizes over coordinates, so only 2-D rules are needed.
/// Throws UnknownLimit for other base kernels.
double double_sum_limit(const BaseKernelSpec& base, const SamplerSpec& mu, const SamplerSpec& nu);

/// Population feature phi(mu) for the sampler's law.
RealVector feature_limit(const FeatureMapSpec& fmap, const SamplerSpec& mu);

}  // namespace mfk::quad
