#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mfk/kernels.hpp"
#include "mfk/sampler.hpp"
#include "mfk/transport.hpp"

namespace mfk {

/// Concave, nondecreasing modulus of continuity with omega(0) = 0, paired with
/// the ground metric under which its argument (a sum of two W1 distances) is measured.
class Modulus {
 public:
  // omega(r) = slope * r
  static Modulus linear(double slope, GroundMetric metric);
  // Piecewise linear through (0,0) and the given knots (strictly increasing r),
  // flat beyond the last knot. Throws ModulusNotConcave if the knots do not
  // describe a concave nondecreasing function.
  static Modulus piecewise(std::vector<std::pair<double, double>> knots, GroundMetric metric);

  double operator()(double r) const;
  const GroundMetric& metric() const { return metric_; }
  bool is_linear() const { return knots_.empty(); }
  double slope() const { return slope_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  // Same shape with values multiplied by factor >= 0.
  Modulus scaled(double factor) const;

 private:
  Modulus(double slope, std::vector<std::pair<double, double>> knots, GroundMetric metric)
      : slope_(slope), knots_(std::move(knots)), metric_(std::move(metric)) {}

  double slope_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
  GroundMetric metric_;
};

/// Moduli known in closed form.
///   Pullback with Lipschitz k0 (Gaussian, inverse multiquadric):
///     omega(r) = Lip(k0) * Lip(phi) * r under the Euclidean ground metric.
///   Double sum: omega(r) = sqrt(C_k0) * r under the kernel metric d_k0.
/// Table kernels have no analytic modulus.
std::optional<Modulus> analytic_modulus(const DistributionKernelSpec& kspec, const DomainBox& box);

struct ModulusSample {
  double distance;
  double deviation;
};

struct ModulusEstimate {
  std::vector<ModulusSample> samples;
  Modulus envelope;
};

// Least concave nondecreasing majorant of the samples, pinned at the origin.
Modulus concave_majorant(const std::vector<ModulusSample>& samples, const GroundMetric& metric);

/// Samples quadruples of M-particle configurations and fits the concave
/// envelope of (d_KR2, |delta k|). Trial t depends only on (seed, t).
ModulusEstimate estimate_modulus(const DistributionKernelSpec& kspec, Eigen::Index m, const SamplerSpec& sampler,
                                 int trials, std::uint64_t seed, const GroundMetric& metric = GroundMetric());

}  // namespace mfk
