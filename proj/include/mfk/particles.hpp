#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfk/measures.hpp"
#include "mfk/sampler.hpp"

namespace mfk {

// phi(z) = exp(-|z|^2 / (2 gamma))
struct GaussianPotential {
  double gamma;
};
// phi(z) = 1 / (1 + |z|^2 / c^2)
struct InverseQuadraticPotential {
  double c;
};
// phi(z) = value
struct ConstantPotential {
  double value;
};
using PairPotential = std::variant<GaussianPotential, InverseQuadraticPotential, ConstantPotential>;

double eval_potential(const PairPotential& phi, const Eigen::Ref<const Point>& z);

// First coordinate of the mean.
struct CoordinateMeanObservable {};
// Mean squared distance to the mean, summed over coordinates.
struct VarianceObservable {};
// (1/M^2) sum_ij phi(x_i - x_j)
struct InteractionEnergyObservable {
  PairPotential potential;
};

/// Permutation-invariant observable f_M with an explicit measure-level limit f.
class ObservableSpec {
 public:
  using Kind = std::variant<CoordinateMeanObservable, VarianceObservable, InteractionEnergyObservable>;

  explicit ObservableSpec(Kind kind);

  const Kind& kind() const { return kind_; }

  // sup |f| over measures supported in box.
  double bound(const DomainBox& box) const;
  // Lipschitz constant L of f w.r.t. W1 (Euclidean ground metric) on box; omega_f(r) = L r.
  double lipschitz(const DomainBox& box) const;

 private:
  Kind kind_;
};

double eval_observable(const ObservableSpec& spec, const ParticleConfiguration& config);
double observable_limit(const ObservableSpec& spec, const DiscreteMeasure& mu);

/// f evaluated on the population law of a sampler, by quadrature. Throws
/// UnknownLimit for interaction potentials that do not factorize when d > 1.
double observable_population_limit(const ObservableSpec& spec, const SamplerSpec& mu);

// Pairwise force F(z) on a particle from a neighbour at relative position z:
//   attraction * z - repulsion * z * exp(-|z|^2 / (2 length^2))
struct AttractionRepulsionDynamics {
  double attraction;
  double repulsion;
  double length;
  double dt;
  double noise;
};

struct PureDiffusionDynamics {
  double dt;
  double noise;
};

struct DynamicsSpec {
  std::variant<AttractionRepulsionDynamics, PureDiffusionDynamics> kind;
  SamplerSpec initial;  // its domain is the reflecting box

  DynamicsSpec(std::variant<AttractionRepulsionDynamics, PureDiffusionDynamics> k, SamplerSpec init);
};

/// Euler-Maruyama with reflection at the box walls. Returns steps + 1
/// configurations, the first being the initial draw.
std::vector<ParticleConfiguration> simulate(const DynamicsSpec& dyn, Eigen::Index m, int steps, std::uint64_t seed);

struct DatasetRecord {
  ParticleConfiguration config;
  double label;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  Eigen::Index m = 0;
  Eigen::Index dim = 0;
  std::string observable;  // description; empty for unlabelled trajectories
  std::string dynamics;
  std::uint64_t seed = 0;
};

Dataset make_dataset(const std::vector<ParticleConfiguration>& configs, const ObservableSpec& observable);

}  // namespace mfk
