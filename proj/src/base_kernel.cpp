#include "mfk/base_kernel.hpp"

#include <cmath>
#include <limits>

#include "mfk/errors.hpp"

namespace mfk {

namespace {
constexpr double kRadicandClamp = 1e-12;
}

BaseKernelSpec::BaseKernelSpec(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GaussianKernel>) {
          if (!(k.gamma > 0.0) || !std::isfinite(k.gamma))
            throw Error(ErrorCode::InvalidArgument, "gaussian gamma must be positive");
          bound_ = 1.0;
        } else if constexpr (std::is_same_v<T, InverseMultiquadricKernel>) {
          if (!(k.c > 0.0) || !std::isfinite(k.c))
            throw Error(ErrorCode::InvalidArgument, "inverse multiquadric c must be positive");
          bound_ = 1.0 / k.c;
        } else {
          const auto g = k.grid.cols();
          if (g < 1 || k.grid.rows() < 1)
            throw Error(ErrorCode::InvalidArgument, "table kernel needs a nonempty grid");
          if (k.values.rows() != g || k.values.cols() != g)
            throw Error(ErrorCode::DimensionMismatch, "table values must be G x G");
          if (!k.values.allFinite() || !k.grid.allFinite())
            throw Error(ErrorCode::NonFiniteValue, "table kernel has non-finite entries");
          if ((k.values - k.values.transpose()).cwiseAbs().maxCoeff() > 0.0)
            throw Error(ErrorCode::NonSymmetricInput, "table kernel values must be symmetric");
          bound_ = k.values.cwiseAbs().maxCoeff();
        }
      },
      kind_);
}

BaseKernelSpec BaseKernelSpec::constant(double value, Eigen::Index dim) {
  return BaseKernelSpec(TableKernel{Eigen::MatrixXd::Zero(dim, 1), Eigen::MatrixXd::Constant(1, 1, value)});
}

Eigen::Index BaseKernelSpec::snap(const Eigen::Ref<const Point>& x) const {
  const auto& t = std::get<TableKernel>(kind_);
  Eigen::Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index g = 0; g < t.grid.cols(); ++g) {
    const double d = (t.grid.col(g) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

double BaseKernelSpec::eval_unchecked(const Eigen::Ref<const Point>& x,
                                      const Eigen::Ref<const Point>& y) const {
  if (const auto* g = std::get_if<GaussianKernel>(&kind_)) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * g->gamma));
  }
  if (const auto* m = std::get_if<InverseMultiquadricKernel>(&kind_)) {
    return 1.0 / std::sqrt((x - y).squaredNorm() + m->c * m->c);
  }
  const auto& t = std::get<TableKernel>(kind_);
  return t.values(snap(x), snap(y));
}

double BaseKernelSpec::operator()(const Eigen::Ref<const Point>& x,
                                  const Eigen::Ref<const Point>& y) const {
  if (x.size() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "kernel arguments differ in dimension");
  if (const auto* t = std::get_if<TableKernel>(&kind_); t && t->grid.rows() != x.size())
    throw Error(ErrorCode::DimensionMismatch, "table kernel grid dimension differs from input");
  return eval_unchecked(x, y);
}

std::optional<double> BaseKernelSpec::lipschitz() const {
  if (const auto* g = std::get_if<GaussianKernel>(&kind_)) {
    // max_r (r / gamma) exp(-r^2 / 2 gamma), attained at r = sqrt(gamma)
    return std::exp(-0.5) / std::sqrt(g->gamma);
  }
  if (const auto* m = std::get_if<InverseMultiquadricKernel>(&kind_)) {
    // max_r r (r^2 + c^2)^(-3/2), attained at r = c / sqrt(2)
    return 2.0 / (3.0 * std::sqrt(3.0) * m->c * m->c);
  }
  return std::nullopt;
}

bool BaseKernelSpec::operator==(const BaseKernelSpec& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  if (const auto* g = std::get_if<GaussianKernel>(&kind_))
    return g->gamma == std::get<GaussianKernel>(other.kind_).gamma;
  if (const auto* m = std::get_if<InverseMultiquadricKernel>(&kind_))
    return m->c == std::get<InverseMultiquadricKernel>(other.kind_).c;
  const auto& a = std::get<TableKernel>(kind_);
  const auto& b = std::get<TableKernel>(other.kind_);
  return a.grid.rows() == b.grid.rows() && a.grid.cols() == b.grid.cols() && a.grid == b.grid &&
         a.values == b.values;
}

double eval_base(const BaseKernelSpec& spec, const Point& x, const Point& y) { return spec(x, y); }

double kernel_metric(const BaseKernelSpec& spec, const Eigen::Ref<const Point>& x,
                     const Eigen::Ref<const Point>& y) {
  const double r = spec(x, x) - 2.0 * spec(x, y) + spec(y, y);
  if (r >= 0.0) return std::sqrt(r);
  if (r >= -kRadicandClamp) return 0.0;
  throw Error(ErrorCode::NegativeRadicand, "kernel metric radicand is negative; kernel is not PSD");
}

}  // namespace mfk
