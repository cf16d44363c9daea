#include "mfk/mcshane.hpp"

#include <algorithm>
#include <limits>

#include "mfk/errors.hpp"
#include "mfk/parallel.hpp"

namespace mfk {

double mcshane_extension(const DistributionKernelSpec& kspec, Eigen::Index m, const Modulus& modulus,
                         const MeasurePair& target, const std::vector<ConfigurationPair>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "mcshane_extension needs candidates");
  for (const auto& [x, y] : candidates)
    if (x.size() != m || y.size() != m)
      throw Error(ErrorCode::InvalidArgument, "every candidate configuration must have M particles");

  std::vector<double> values(candidates.size());
  parallel_for(static_cast<std::ptrdiff_t>(candidates.size()), [&](std::ptrdiff_t c) {
    const auto ex = empirical_measure(candidates[c].first);
    const auto ey = empirical_measure(candidates[c].second);
    const double d = dkr2({ex, ey}, target, modulus.metric());
    values[c] = kspec(ex, ey) + modulus(d);
  });
  return *std::min_element(values.begin(), values.end());
}

}  // namespace mfk
