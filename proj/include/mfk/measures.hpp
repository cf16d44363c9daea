#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "mfk/numeric.hpp"

namespace mfk {

using Point = Eigen::VectorXd;
using RealVector = Eigen::VectorXd;

// Absolute tolerance on |sum of weights - 1|.
inline constexpr double kWeightSumTolerance = 1e-12;

/// Compact axis-aligned box in R^d; the state space X of every particle.
class DomainBox {
 public:
  DomainBox(RealVector lower, RealVector upper);

  static DomainBox unit(Eigen::Index dim);

  Eigen::Index dim() const { return lower_.size(); }
  const RealVector& lower() const { return lower_; }
  const RealVector& upper() const { return upper_; }

  bool contains(const Eigen::Ref<const Point>& x) const;
  // Largest Euclidean norm of any point in the box.
  double max_norm() const;
  double diameter() const;

  bool operator==(const DomainBox& other) const;

 private:
  RealVector lower_;
  RealVector upper_;
};

/// Ordered tuple of M >= 1 points in R^d, stored column-wise (d x M).
class ParticleConfiguration {
 public:
  explicit ParticleConfiguration(Eigen::MatrixXd points);

  Eigen::Index dim() const { return points_.rows(); }
  Eigen::Index size() const { return points_.cols(); }
  const Eigen::MatrixXd& points() const { return points_; }
  auto point(Eigen::Index i) const { return points_.col(i); }

  // Reorders particles: result[i] = this[perm[i]].
  ParticleConfiguration permuted(const std::vector<Eigen::Index>& perm) const;

 private:
  Eigen::MatrixXd points_;
};

/// Finitely supported probability measure: weighted atoms (d x n).
///
/// Duplicate atoms are kept as separate entries; see coalesce().
class DiscreteMeasure {
 public:
  DiscreteMeasure(Eigen::MatrixXd atoms, RealVector weights);

  static DiscreteMeasure dirac(const Point& x);

  Eigen::Index dim() const { return atoms_.rows(); }
  Eigen::Index size() const { return atoms_.cols(); }
  const Eigen::MatrixXd& atoms() const { return atoms_; }
  const RealVector& weights() const { return weights_; }
  auto atom(Eigen::Index i) const { return atoms_.col(i); }
  double weight(Eigen::Index i) const { return weights_[i]; }

  // Copy without zero-weight atoms; the weights are left untouched.
  DiscreteMeasure without_zero_weights() const;

  // Merges atoms at distance exactly 0, summing their weights. Order of first appearance is kept.
  DiscreteMeasure coalesce() const;

  // Exact equality of atoms and weights, in order.
  bool operator==(const DiscreteMeasure& other) const;

 private:
  Eigen::MatrixXd atoms_;
  RealVector weights_;
};

/// Throws Error with EmptySupport, NegativeWeight, WeightSumOffByMoreThanTolerance,
/// NonFiniteValue, DimensionMismatch or AtomOutsideDomain (checked in that order).
void validate_measure(const Eigen::MatrixXd& atoms, const RealVector& weights,
                      const DomainBox* box = nullptr);
void validate_measure(const DiscreteMeasure& mu, const DomainBox& box);

void validate_configuration(const ParticleConfiguration& config, const DomainBox& box);

DiscreteMeasure empirical_measure(const ParticleConfiguration& config);

RealVector measure_mean(const DiscreteMeasure& mu);

// Integral of a scalar function against mu, accumulated pairwise.
template <typename F>
double integrate(const DiscreteMeasure& mu, F&& f) {
  std::vector<double> terms(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) terms[i] = mu.weight(i) * f(mu.atom(i));
  return pairwise_sum(terms);
}

}  // namespace mfk
