#include "mfk/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "mfk/errors.hpp"

namespace mfk {

Rng make_rng(const std::vector<std::uint64_t>& keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * keys.size() + 1);
  words.push_back(0x6d666bu);
  for (auto k : keys) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  return make_rng(std::vector<std::uint64_t>(keys));
}

namespace {

bool box_inside(const DomainBox& inner, const DomainBox& outer) {
  return inner.dim() == outer.dim() && (inner.lower().array() >= outer.lower().array()).all() &&
         (inner.upper().array() <= outer.upper().array()).all();
}

void check_support(const SamplerSpec::Kind& kind, const DomainBox& domain) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformBoxSampler>) {
          if (!box_inside(s.support, domain))
            throw Error(ErrorCode::AtomOutsideDomain, "uniform sampler box leaves the domain");
        } else if constexpr (std::is_same_v<T, TruncatedNormalSampler>) {
          if (!box_inside(s.support, domain))
            throw Error(ErrorCode::AtomOutsideDomain, "truncation box leaves the domain");
          if (s.mean.size() != domain.dim() || s.stddev.size() != domain.dim())
            throw Error(ErrorCode::DimensionMismatch, "truncated normal parameters have wrong length");
          if (!((s.stddev.array() > 0.0).all()) || !s.mean.allFinite() || !s.stddev.allFinite())
            throw Error(ErrorCode::InvalidArgument, "truncated normal needs finite mean and stddev > 0");
        } else if constexpr (std::is_same_v<T, BoxMixtureSampler>) {
          if (s.components.empty() || s.components.size() != s.weights.size())
            throw Error(ErrorCode::InvalidArgument, "mixture needs matching nonempty components and weights");
          double total = 0.0;
          for (std::size_t i = 0; i < s.components.size(); ++i) {
            if (!box_inside(s.components[i], domain))
              throw Error(ErrorCode::AtomOutsideDomain, "mixture component leaves the domain");
            if (!(s.weights[i] >= 0.0)) throw Error(ErrorCode::NegativeWeight, "mixture weight is negative");
            total += s.weights[i];
          }
          if (std::abs(total - 1.0) > kWeightSumTolerance)
            throw Error(ErrorCode::WeightSumOffByMoreThanTolerance, "mixture weights do not sum to 1");
        } else {
          if (!domain.contains(s.location))
            throw Error(ErrorCode::AtomOutsideDomain, "dirac location leaves the domain");
        }
      },
      kind);
}

double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  // Rejection from the untruncated normal; falls back to uniform proposals
  // when the acceptance rate would be tiny.
  std::normal_distribution<double> normal(mean, sd);
  for (int attempt = 0; attempt < 256; ++attempt) {
    const double x = normal(rng);
    if (x >= lo && x <= hi) return x;
  }
  std::uniform_real_distribution<double> uni(lo, hi);
  double peak = std::clamp(mean, lo, hi);
  for (;;) {
    const double x = uni(rng);
    const double z = (x - mean) / sd;
    const double zp = (peak - mean) / sd;
    const double accept = std::exp(-0.5 * (z * z - zp * zp));
    if (std::generate_canonical<double, 53>(rng) <= accept) return x;
  }
}

Point uniform_in(const DomainBox& box, Rng& rng) {
  Point x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    std::uniform_real_distribution<double> uni(box.lower()[i], box.upper()[i]);
    x[i] = uni(rng);
  }
  return x;
}

}  // namespace

SamplerSpec::SamplerSpec(Kind kind, DomainBox domain) : kind_(std::move(kind)), domain_(std::move(domain)) {
  check_support(kind_, domain_);
}

Point SamplerSpec::draw(Rng& rng) const {
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformBoxSampler>) {
          return uniform_in(s.support, rng);
        } else if constexpr (std::is_same_v<T, TruncatedNormalSampler>) {
          Point x(s.mean.size());
          for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = truncated_normal(rng, s.mean[i], s.stddev[i], s.support.lower()[i], s.support.upper()[i]);
          return x;
        } else if constexpr (std::is_same_v<T, BoxMixtureSampler>) {
          std::discrete_distribution<std::size_t> pick(s.weights.begin(), s.weights.end());
          return uniform_in(s.components[pick(rng)], rng);
        } else {
          return s.location;
        }
      },
      kind_);
}

ParticleConfiguration sample_configuration(const SamplerSpec& dist, Eigen::Index m, Rng& rng) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
  Eigen::MatrixXd pts(dist.dim(), m);
  for (Eigen::Index i = 0; i < m; ++i) pts.col(i) = dist.draw(rng);
  return ParticleConfiguration(std::move(pts));
}

ParticleConfiguration sample_configuration(const SamplerSpec& dist, Eigen::Index m, std::uint64_t seed) {
  Rng rng = make_rng({seed});
  return sample_configuration(dist, m, rng);
}

}  // namespace mfk
