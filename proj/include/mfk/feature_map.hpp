#pragma once

#include <variant>

#include "mfk/measures.hpp"

namespace mfk {

// phi(mu) = integral of x.
struct MeanFeature {};

// Coordinatewise moments: (E[x_c^1], ..., E[x_c^p]) for each coordinate c.
struct MomentsFeature {
  int order;
};

// phi_g(mu) = E[exp(-|x - g|^2 / (2 h^2))] for each grid node g.
struct SoftHistogramFeature {
  Eigen::MatrixXd grid;  // dim x G
  double bandwidth;
};

/// Permutation-invariant feature map, evaluated on measures.
class FeatureMapSpec {
 public:
  using Kind = std::variant<MeanFeature, MomentsFeature, SoftHistogramFeature>;

  explicit FeatureMapSpec(Kind kind = MeanFeature{});

  static FeatureMapSpec mean() { return FeatureMapSpec(MeanFeature{}); }
  static FeatureMapSpec moments(int order) { return FeatureMapSpec(MomentsFeature{order}); }

  const Kind& kind() const { return kind_; }

  // Dimension q of the feature space for inputs of dimension d.
  Eigen::Index output_dim(Eigen::Index d) const;

  RealVector operator()(const DiscreteMeasure& mu) const;

  // Constant L with |phi(mu) - phi(nu)| <= L * W1(mu, nu), W1 under the
  // Euclidean ground metric, for measures supported in `box`.
  //   Mean: 1.  Moments: sqrt(sum_c sum_j (j R_c^(j-1))^2), R_c = max |x_c| on the box.
  //   SoftHistogram: sqrt(G) e^(-1/2) / h. (Upper bound; not known to be tight.)
  double lipschitz(const DomainBox& box) const;

  bool operator==(const FeatureMapSpec& other) const;

 private:
  Kind kind_;
};

}  // namespace mfk
