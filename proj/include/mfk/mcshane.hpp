#pragma once

#include <utility>
#include <vector>

#include "mfk/kernels.hpp"
#include "mfk/modulus.hpp"
#include "mfk/transport.hpp"

namespace mfk {

using ConfigurationPair = std::pair<ParticleConfiguration, ParticleConfiguration>;

/// Candidate-set approximation of the McShane-type extension of k^[M] to pairs of measures:
///   min over candidates (x, x') of k^[M](x, x') + omega(d_KR2[(mu[x], mu[x']), target]).
/// It upper-bounds the infimum over all of X^M x X^M and equals k^[M](c, c')
/// when target is the empirical pair of a candidate and omega dominates the true modulus.
double mcshane_extension(const DistributionKernelSpec& kspec, Eigen::Index m, const Modulus& modulus,
                         const MeasurePair& target, const std::vector<ConfigurationPair>& candidates);

}  // namespace mfk
