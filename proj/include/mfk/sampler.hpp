#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <variant>
#include <vector>

#include "mfk/measures.hpp"

namespace mfk {

using Rng = std::mt19937_64;

// Seeds a generator from a list of integers (base seed, stream tags, ...).
Rng make_rng(std::initializer_list<std::uint64_t> keys);
Rng make_rng(const std::vector<std::uint64_t>& keys);

struct UniformBoxSampler {
  DomainBox support;
};

// Independent coordinates, each a normal truncated to the box side.
struct TruncatedNormalSampler {
  RealVector mean;
  RealVector stddev;
  DomainBox support;
};

struct BoxMixtureSampler {
  std::vector<DomainBox> components;
  std::vector<double> weights;
};

struct DiracSampler {
  Point location;
};

/// Distribution on the domain box from which particles are drawn i.i.d.
class SamplerSpec {
 public:
  using Kind = std::variant<UniformBoxSampler, TruncatedNormalSampler, BoxMixtureSampler, DiracSampler>;

  // Rejects samplers whose support leaves `domain`.
  SamplerSpec(Kind kind, DomainBox domain);

  static SamplerSpec uniform(const DomainBox& box) { return SamplerSpec(UniformBoxSampler{box}, box); }

  const Kind& kind() const { return kind_; }
  const DomainBox& domain() const { return domain_; }
  Eigen::Index dim() const { return domain_.dim(); }

  Point draw(Rng& rng) const;

 private:
  Kind kind_;
  DomainBox domain_;
};

ParticleConfiguration sample_configuration(const SamplerSpec& dist, Eigen::Index m, std::uint64_t seed);
ParticleConfiguration sample_configuration(const SamplerSpec& dist, Eigen::Index m, Rng& rng);

}  // namespace mfk
