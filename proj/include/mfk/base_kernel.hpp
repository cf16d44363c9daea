#pragma once

#include <optional>
#include <variant>

#include "mfk/measures.hpp"

namespace mfk {

// exp(-|x-y|^2 / (2 gamma)); gamma acts as a squared lengthscale.
struct GaussianKernel {
  double gamma;
};

// (|x-y|^2 + c^2)^(-1/2), bounded by 1/c.
struct InverseMultiquadricKernel {
  double c;
};

// Explicit PSD matrix over a finite grid. Inputs are snapped to the nearest
// grid node (lowest index on ties), so the kernel is a pullback of the table.
struct TableKernel {
  Eigen::MatrixXd grid;    // dim x G
  Eigen::MatrixXd values;  // G x G
};

/// Base kernel k0 on R^d with its uniform bound C_k0.
class BaseKernelSpec {
 public:
  using Kind = std::variant<GaussianKernel, InverseMultiquadricKernel, TableKernel>;

  explicit BaseKernelSpec(Kind kind);

  static BaseKernelSpec gaussian(double gamma) { return BaseKernelSpec(GaussianKernel{gamma}); }
  static BaseKernelSpec inverse_multiquadric(double c) {
    return BaseKernelSpec(InverseMultiquadricKernel{c});
  }
  // Single-node table: k0 == value everywhere.
  static BaseKernelSpec constant(double value, Eigen::Index dim);

  const Kind& kind() const { return kind_; }
  double bound() const { return bound_; }

  double operator()(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y) const;
  // Same as operator() without dimension checks; for inner loops.
  double eval_unchecked(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y) const;

  // Lipschitz constant of k0 in each argument w.r.t. the Euclidean norm, if finite.
  std::optional<double> lipschitz() const;

  bool is_gaussian() const { return std::holds_alternative<GaussianKernel>(kind_); }

  bool operator==(const BaseKernelSpec& other) const;

 private:
  Eigen::Index snap(const Eigen::Ref<const Point>& x) const;

  Kind kind_;
  double bound_ = 0.0;
};

double eval_base(const BaseKernelSpec& spec, const Point& x, const Point& y);

// sqrt(k(x,x) - 2 k(x,y) + k(y,y)); radicands in [-1e-12, 0) clamp to 0.
double kernel_metric(const BaseKernelSpec& spec, const Eigen::Ref<const Point>& x,
                     const Eigen::Ref<const Point>& y);

}  // namespace mfk
