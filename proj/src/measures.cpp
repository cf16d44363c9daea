#include "mfk/measures.hpp"

#include <cmath>
#include <sstream>

#include "mfk/errors.hpp"

namespace mfk {

DomainBox::DomainBox(RealVector lower, RealVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size())
    throw Error(ErrorCode::InvalidBox, "box bounds must be nonempty and of equal length");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
      throw Error(ErrorCode::InvalidBox, "box bounds must be finite");
    if (!(lower_[i] < upper_[i])) {
      std::ostringstream msg;
      msg << "box is degenerate in coordinate " << i << ": [" << lower_[i] << ", " << upper_[i]
          << "]";
      throw Error(ErrorCode::InvalidBox, msg.str());
    }
  }
}

DomainBox DomainBox::unit(Eigen::Index dim) {
  return DomainBox(RealVector::Zero(dim), RealVector::Ones(dim));
}

bool DomainBox::contains(const Eigen::Ref<const Point>& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  return true;
}

double DomainBox::max_norm() const {
  return lower_.cwiseAbs().cwiseMax(upper_.cwiseAbs()).norm();
}

double DomainBox::diameter() const { return (upper_ - lower_).norm(); }

bool DomainBox::operator==(const DomainBox& other) const {
  return dim() == other.dim() && lower_ == other.lower_ && upper_ == other.upper_;
}

ParticleConfiguration::ParticleConfiguration(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.cols() < 1) throw Error(ErrorCode::EmptySupport, "configuration needs M >= 1");
  if (points_.rows() < 1) throw Error(ErrorCode::DimensionMismatch, "points need dimension >= 1");
  if (!points_.allFinite())
    throw Error(ErrorCode::NonFiniteValue, "configuration has non-finite coordinates");
}

ParticleConfiguration ParticleConfiguration::permuted(const std::vector<Eigen::Index>& perm) const {
  if (static_cast<Eigen::Index>(perm.size()) != size())
    throw Error(ErrorCode::InvalidArgument, "permutation length differs from M");
  Eigen::MatrixXd out(dim(), size());
  for (Eigen::Index i = 0; i < size(); ++i) out.col(i) = points_.col(perm[i]);
  return ParticleConfiguration(std::move(out));
}

void validate_measure(const Eigen::MatrixXd& atoms, const RealVector& weights,
                      const DomainBox* box) {
  if (atoms.cols() == 0 || weights.size() == 0)
    throw Error(ErrorCode::EmptySupport, "measure has no atoms");
  if (atoms.cols() != weights.size())
    throw Error(ErrorCode::DimensionMismatch, "atom count differs from weight count");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (std::isnan(weights[i]) || weights[i] < 0.0) {
      std::ostringstream msg;
      msg << "weight " << i << " is negative: " << weights[i];
      throw Error(ErrorCode::NegativeWeight, msg.str());
    }
  }
  std::vector<double> w(weights.data(), weights.data() + weights.size());
  const double total = pairwise_sum(w);
  if (!(std::abs(total - 1.0) <= kWeightSumTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << total;
    throw Error(ErrorCode::WeightSumOffByMoreThanTolerance, msg.str());
  }
  if (!atoms.allFinite()) throw Error(ErrorCode::NonFiniteValue, "measure has non-finite atoms");
  if (box != nullptr) {
    if (atoms.rows() != box->dim())
      throw Error(ErrorCode::DimensionMismatch, "measure dimension differs from domain");
    for (Eigen::Index i = 0; i < atoms.cols(); ++i)
      if (!box->contains(atoms.col(i))) {
        std::ostringstream msg;
        msg << "atom " << i << " lies outside the domain box";
        throw Error(ErrorCode::AtomOutsideDomain, msg.str());
      }
  }
}

void validate_measure(const DiscreteMeasure& mu, const DomainBox& box) {
  validate_measure(mu.atoms(), mu.weights(), &box);
}

void validate_configuration(const ParticleConfiguration& config, const DomainBox& box) {
  if (config.dim() != box.dim())
    throw Error(ErrorCode::DimensionMismatch, "configuration dimension differs from domain");
  for (Eigen::Index i = 0; i < config.size(); ++i)
    if (!box.contains(config.point(i)))
      throw Error(ErrorCode::AtomOutsideDomain, "particle lies outside the domain box");
}

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd atoms, RealVector weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.rows() < 1 && atoms_.cols() > 0)
    throw Error(ErrorCode::DimensionMismatch, "atoms need dimension >= 1");
  validate_measure(atoms_, weights_);
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& x) {
  return DiscreteMeasure(Eigen::MatrixXd(x), RealVector::Ones(1));
}

DiscreteMeasure DiscreteMeasure::without_zero_weights() const {
  Eigen::Index kept = (weights_.array() > 0.0).count();
  if (kept == size()) return *this;
  Eigen::MatrixXd a(dim(), kept);
  RealVector w(kept);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (weights_[i] > 0.0) {
      a.col(k) = atoms_.col(i);
      w[k] = weights_[i];
      ++k;
    }
  }
  return DiscreteMeasure(std::move(a), std::move(w));
}

DiscreteMeasure DiscreteMeasure::coalesce() const {
  std::vector<Eigen::Index> rep;
  std::vector<double> w;
  for (Eigen::Index i = 0; i < size(); ++i) {
    bool merged = false;
    for (std::size_t r = 0; r < rep.size(); ++r) {
      if (atoms_.col(rep[r]) == atoms_.col(i)) {
        w[r] += weights_[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      rep.push_back(i);
      w.push_back(weights_[i]);
    }
  }
  Eigen::MatrixXd a(dim(), static_cast<Eigen::Index>(rep.size()));
  for (std::size_t r = 0; r < rep.size(); ++r) a.col(static_cast<Eigen::Index>(r)) = atoms_.col(rep[r]);
  return DiscreteMeasure(std::move(a), Eigen::Map<RealVector>(w.data(), static_cast<Eigen::Index>(w.size())));
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& other) const {
  return dim() == other.dim() && size() == other.size() && atoms_ == other.atoms_ &&
         weights_ == other.weights_;
}

DiscreteMeasure empirical_measure(const ParticleConfiguration& config) {
  const auto m = config.size();
  return DiscreteMeasure(config.points(), RealVector::Constant(m, 1.0 / static_cast<double>(m)));
}

RealVector measure_mean(const DiscreteMeasure& mu) {
  // Accumulate deviations from the first atom so that a measure with a
  // single repeated atom returns that atom exactly.
  const RealVector anchor = mu.atom(0);
  RealVector out(mu.dim());
  std::vector<double> terms(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index c = 0; c < mu.dim(); ++c) {
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      terms[i] = mu.weight(i) * (mu.atoms()(c, i) - anchor[c]);
    out[c] = anchor[c] + pairwise_sum(terms);
  }
  return out;
}

}  // namespace mfk
