#include "mfk/feature_map.hpp"

#include <cmath>

#include "mfk/errors.hpp"

namespace mfk {

FeatureMapSpec::FeatureMapSpec(Kind kind) : kind_(std::move(kind)) {
  if (const auto* m = std::get_if<MomentsFeature>(&kind_); m && m->order < 1)
    throw Error(ErrorCode::InvalidArgument, "moments feature map needs order >= 1");
  if (const auto* h = std::get_if<SoftHistogramFeature>(&kind_)) {
    if (h->grid.cols() < 1 || !(h->bandwidth > 0.0))
      throw Error(ErrorCode::InvalidArgument, "soft histogram needs a nonempty grid and bandwidth > 0");
  }
}

Eigen::Index FeatureMapSpec::output_dim(Eigen::Index d) const {
  if (std::holds_alternative<MeanFeature>(kind_)) return d;
  if (const auto* m = std::get_if<MomentsFeature>(&kind_)) return d * m->order;
  return std::get<SoftHistogramFeature>(kind_).grid.cols();
}

RealVector FeatureMapSpec::operator()(const DiscreteMeasure& mu) const {
  if (std::holds_alternative<MeanFeature>(kind_)) return measure_mean(mu);
  if (const auto* m = std::get_if<MomentsFeature>(&kind_)) {
    RealVector out(mu.dim() * m->order);
    for (Eigen::Index c = 0; c < mu.dim(); ++c)
      for (int j = 1; j <= m->order; ++j)
        out[c * m->order + (j - 1)] = integrate(mu, [&](const auto& x) { return std::pow(x[c], j); });
    return out;
  }
  const auto& h = std::get<SoftHistogramFeature>(kind_);
  if (h.grid.rows() != mu.dim())
    throw Error(ErrorCode::DimensionMismatch, "soft histogram grid dimension differs from measure");
  RealVector out(h.grid.cols());
  const double denom = 2.0 * h.bandwidth * h.bandwidth;
  for (Eigen::Index g = 0; g < h.grid.cols(); ++g)
    out[g] = integrate(mu, [&](const auto& x) { return std::exp(-(x - h.grid.col(g)).squaredNorm() / denom); });
  return out;
}

double FeatureMapSpec::lipschitz(const DomainBox& box) const {
  if (std::holds_alternative<MeanFeature>(kind_)) return 1.0;
  if (const auto* m = std::get_if<MomentsFeature>(&kind_)) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < box.dim(); ++c) {
      const double r = std::max(std::abs(box.lower()[c]), std::abs(box.upper()[c]));
      for (int j = 1; j <= m->order; ++j) {
        const double l = j * std::pow(r, j - 1);
        total += l * l;
      }
    }
    return std::sqrt(total);
  }
  const auto& h = std::get<SoftHistogramFeature>(kind_);
  return std::sqrt(static_cast<double>(h.grid.cols())) * std::exp(-0.5) / h.bandwidth;
}

bool FeatureMapSpec::operator==(const FeatureMapSpec& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  if (const auto* m = std::get_if<MomentsFeature>(&kind_))
    return m->order == std::get<MomentsFeature>(other.kind_).order;
  if (const auto* h = std::get_if<SoftHistogramFeature>(&kind_)) {
    const auto& o = std::get<SoftHistogramFeature>(other.kind_);
    return h->bandwidth == o.bandwidth && h->grid.rows() == o.grid.rows() &&
           h->grid.cols() == o.grid.cols() && h->grid == o.grid;
  }
  return true;
}

}  // namespace mfk
