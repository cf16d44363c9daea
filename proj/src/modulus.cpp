#include "mfk/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfk/errors.hpp"
#include "mfk/parallel.hpp"

namespace mfk {

namespace {
constexpr double kConcavityTolerance = 1e-12;
}

Modulus Modulus::linear(double slope, GroundMetric metric) {
  if (!(slope >= 0.0) || !std::isfinite(slope))
    throw Error(ErrorCode::ModulusNotConcave, "linear modulus needs a finite slope >= 0");
  return Modulus(slope, {}, std::move(metric));
}

Modulus Modulus::piecewise(std::vector<std::pair<double, double>> knots, GroundMetric metric) {
  if (knots.empty()) return Modulus(0.0, {}, std::move(metric));
  double prev_r = 0.0, prev_y = 0.0;
  double prev_slope = std::numeric_limits<double>::infinity();
  for (const auto& [r, y] : knots) {
    if (!(r > prev_r) || !std::isfinite(r) || !std::isfinite(y))
      throw Error(ErrorCode::ModulusNotConcave, "modulus knots must have strictly increasing positive r");
    if (y < prev_y) throw Error(ErrorCode::ModulusNotConcave, "modulus must be nondecreasing");
    const double s = (y - prev_y) / (r - prev_r);
    if (s > prev_slope * (1.0 + kConcavityTolerance) + kConcavityTolerance)
      throw Error(ErrorCode::ModulusNotConcave, "modulus slopes must be nonincreasing");
    prev_slope = s;
    prev_r = r;
    prev_y = y;
  }
  Modulus out(0.0, std::move(knots), std::move(metric));
  return out;
}

double Modulus::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  if (knots_.empty()) return slope_ * r;
  double r0 = 0.0, y0 = 0.0;
  for (const auto& [r1, y1] : knots_) {
    if (r <= r1) return y0 + (y1 - y0) * (r - r0) / (r1 - r0);
    r0 = r1;
    y0 = y1;
  }
  return y0;
}

Modulus Modulus::scaled(double factor) const {
  if (!(factor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "modulus scale must be >= 0");
  if (knots_.empty()) return Modulus(slope_ * factor, {}, metric_);
  auto k = knots_;
  for (auto& [r, y] : k) y *= factor;
  return Modulus(0.0, std::move(k), metric_);
}

std::optional<Modulus> analytic_modulus(const DistributionKernelSpec& kspec, const DomainBox& box) {
  if (kspec.is_double_sum()) {
    if (std::holds_alternative<TableKernel>(kspec.base().kind())) return std::nullopt;
    return Modulus::linear(std::sqrt(kspec.bound()), GroundMetric::kernel(kspec.base()));
  }
  const auto& p = std::get<PullbackFamily>(kspec.kind());
  const auto lip = p.base.lipschitz();
  if (!lip) return std::nullopt;
  return Modulus::linear(*lip * p.fmap.lipschitz(box), GroundMetric::euclidean());
}

Modulus concave_majorant(const std::vector<ModulusSample>& samples, const GroundMetric& metric) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (const auto& s : samples)
    if (s.distance > 0.0) pts.emplace_back(s.distance, std::max(0.0, s.deviation));
  std::sort(pts.begin(), pts.end());

  // Upper hull (Andrew's monotone chain), keeping the highest point per abscissa.
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    if (!hull.empty() && hull.back().first == p.first) {
      if (hull.size() == 1) continue;  // the pinned origin stays
      hull.pop_back();
    }
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  // Flatten after the peak to make the hull nondecreasing.
  std::vector<std::pair<double, double>> knots;
  double peak = 0.0;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (hull[i].second <= peak) break;
    peak = hull[i].second;
    knots.push_back(hull[i]);
  }
  return Modulus::piecewise(std::move(knots), metric);
}

namespace {

ParticleConfiguration perturbed(const ParticleConfiguration& x, const DomainBox& box, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = unit(rng) * box.diameter() / std::sqrt(static_cast<double>(box.dim()));
  Eigen::MatrixXd pts = x.points();
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    for (Eigen::Index c = 0; c < pts.rows(); ++c)
      pts(c, i) = std::clamp(pts(c, i) + scale * normal(rng), box.lower()[c], box.upper()[c]);
  return ParticleConfiguration(std::move(pts));
}

}  // namespace

ModulusEstimate estimate_modulus(const DistributionKernelSpec& kspec, Eigen::Index m, const SamplerSpec& sampler,
                                 int trials, std::uint64_t seed, const GroundMetric& metric) {
  if (trials < 10) throw Error(ErrorCode::InvalidArgument, "estimate_modulus needs trials >= 10");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "estimate_modulus needs M >= 1");
  std::vector<ModulusSample> samples(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](std::ptrdiff_t t) {
    Rng rng = make_rng({seed, static_cast<std::uint64_t>(t), 0x6d6f64u});
    const auto x1 = sample_configuration(sampler, m, rng);
    const auto y1 = sample_configuration(sampler, m, rng);
    std::bernoulli_distribution coin(0.5);
    const auto x2 = coin(rng) ? perturbed(x1, sampler.domain(), rng) : sample_configuration(sampler, m, rng);
    const auto y2 = coin(rng) ? perturbed(y1, sampler.domain(), rng) : sample_configuration(sampler, m, rng);
    const auto ex1 = empirical_measure(x1), ey1 = empirical_measure(y1);
    const auto ex2 = empirical_measure(x2), ey2 = empirical_measure(y2);
    const double d = dkr2({ex1, ey1}, {ex2, ey2}, metric);
    samples[t] = {d, std::abs(kspec(ex1, ey1) - kspec(ex2, ey2))};
  });
  auto envelope = concave_majorant(samples, metric);
  return {std::move(samples), std::move(envelope)};
}

}  // namespace mfk
