#include "mfk/meanfield.hpp"

#include <cmath>

#include "mfk/errors.hpp"
#include "mfk/mcshane.hpp"
#include "mfk/modulus.hpp"
#include "mfk/numeric.hpp"
#include "mfk/parallel.hpp"
#include "mfk/quadrature.hpp"

namespace mfk {

namespace {

constexpr std::uint64_t kStreamMu = 0x6d75;
constexpr std::uint64_t kStreamNu = 0x6e75;
constexpr std::uint64_t kStreamTrain = 0x7472;
constexpr std::uint64_t kStreamTest = 0x7465;

double population_kernel(const DistributionKernelSpec& kspec, const SamplerSpec& mu, const SamplerSpec& nu) {
  if (kspec.is_double_sum()) return quad::double_sum_limit(kspec.base(), mu, nu);
  const auto& p = std::get<PullbackFamily>(kspec.kind());
  return p.base(quad::feature_limit(p.fmap, mu), quad::feature_limit(p.fmap, nu));
}

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
  std::vector<double> sq(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) sq[i] = (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

}  // namespace

ConvergenceReport kernel_convergence_study(const DistributionKernelSpec& kspec, const SamplerSpec& mu,
                                           const SamplerSpec& nu, const std::vector<std::int64_t>& m_grid,
                                           int n_seeds, std::uint64_t base_seed) {
  if (m_grid.empty()) throw Error(ErrorCode::InvalidArgument, "m_grid must be nonempty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1) throw Error(ErrorCode::InvalidArgument, "m_grid entries must be positive");
    if (i > 0 && m_grid[i] <= m_grid[i - 1])
      throw Error(ErrorCode::InvalidArgument, "m_grid must be strictly increasing");
  }
  if (n_seeds < kMinSeedsPerM) throw Error(ErrorCode::InvalidArgument, "convergence study needs >= 8 seeds per M");
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "samplers differ in dimension");

  ConvergenceReport report;
  report.limit_value = population_kernel(kspec, mu, nu);
  report.m_grid = m_grid;
  for (int s = 0; s < n_seeds; ++s) report.seeds.push_back(base_seed + static_cast<std::uint64_t>(s));
  report.note =
      "errors are |k^[M](x, x') - k(mu, nu)| for i.i.d. draws; any decay rate reflects the sampling scheme";

  const auto n_cells = static_cast<std::ptrdiff_t>(m_grid.size()) * n_seeds;
  std::vector<double> errors(static_cast<std::size_t>(n_cells));
  parallel_for(n_cells, [&](std::ptrdiff_t cell) {
    const auto m = m_grid[static_cast<std::size_t>(cell / n_seeds)];
    const auto seed = report.seeds[static_cast<std::size_t>(cell % n_seeds)];
    Rng rng_mu = make_rng({seed, static_cast<std::uint64_t>(m), kStreamMu});
    Rng rng_nu = make_rng({seed, static_cast<std::uint64_t>(m), kStreamNu});
    const auto x = sample_configuration(mu, m, rng_mu);
    const auto y = sample_configuration(nu, m, rng_nu);
    errors[static_cast<std::size_t>(cell)] = std::abs(kspec(x, y) - report.limit_value);
  });

  std::vector<double> log_m, log_med;
  bool positive = true;
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    std::vector<double> e(errors.begin() + static_cast<std::ptrdiff_t>(g) * n_seeds,
                          errors.begin() + static_cast<std::ptrdiff_t>(g + 1) * n_seeds);
    ErrorStats st{m_grid[g], median(e), quantile(e, 0.25), quantile(e, 0.75)};
    report.stats.push_back(st);
    positive = positive && st.median > 0.0;
    log_m.push_back(std::log(static_cast<double>(m_grid[g])));
    log_med.push_back(std::log(st.median));
  }
  if (positive && m_grid.size() >= 2) report.slope = ls_slope(log_m, log_med);
  return report;
}

McShaneCheckReport mcshane_consistency_check(const DistributionKernelSpec& kspec, Eigen::Index m, int n_pairs,
                                             std::uint64_t seed, const SamplerSpec& sampler, int n_decoys,
                                             double modulus_scale) {
  if (n_pairs < 1) throw Error(ErrorCode::InvalidArgument, "mcshane check needs n_pairs >= 1");
  if (n_decoys < 0) throw Error(ErrorCode::InvalidArgument, "n_decoys must be >= 0");
  const auto modulus = analytic_modulus(kspec, sampler.domain());
  if (!modulus) throw Error(ErrorCode::NoAnalyticModulus, "kernel family has no analytic modulus");
  const Modulus omega = modulus->scaled(modulus_scale);

  McShaneCheckReport report;
  report.n_pairs = n_pairs;
  report.n_decoys = n_decoys;
  report.modulus_scale = modulus_scale;
  report.deviations.resize(static_cast<std::size_t>(n_pairs));
  for (int p = 0; p < n_pairs; ++p) {
    Rng rng = make_rng({seed, static_cast<std::uint64_t>(p), 0x6d63u});
    std::vector<ConfigurationPair> candidates;
    auto x = sample_configuration(sampler, m, rng);
    auto y = sample_configuration(sampler, m, rng);
    const MeasurePair target{empirical_measure(x), empirical_measure(y)};
    const double own = kspec(target.first, target.second);
    candidates.emplace_back(std::move(x), std::move(y));
    for (int k = 0; k < n_decoys; ++k) {
      auto a = sample_configuration(sampler, m, rng);
      auto b = sample_configuration(sampler, m, rng);
      candidates.emplace_back(std::move(a), std::move(b));
    }
    const double ext = mcshane_extension(kspec, m, omega, target, candidates);
    report.deviations[static_cast<std::size_t>(p)] = std::abs(ext - own);
    if (ext < own - 1e-12) report.modulus_violation = true;
  }
  for (double d : report.deviations) report.max_deviation = std::max(report.max_deviation, d);
  return report;
}

SamplerSpec LawFamily::draw_law(Rng& rng) const {
  std::uniform_real_distribution<double> mean_dist(mean_lo, mean_hi);
  std::uniform_real_distribution<double> sd_dist(sd_lo, sd_hi);
  RealVector mean(domain.dim()), sd(domain.dim());
  for (Eigen::Index c = 0; c < domain.dim(); ++c) {
    mean[c] = mean_lo == mean_hi ? mean_lo : mean_dist(rng);
    sd[c] = sd_lo == sd_hi ? sd_lo : sd_dist(rng);
  }
  return SamplerSpec(TruncatedNormalSampler{mean, sd, domain}, domain);
}

TransferReport functional_transfer_study(const TransferConfig& cfg) {
  if (cfg.n_train < 1 || cfg.n_test < 1) throw Error(ErrorCode::InvalidArgument, "transfer needs n_train, n_test >= 1");
  if (cfg.train_m < 1) throw Error(ErrorCode::InvalidArgument, "train_m must be positive");
  for (auto m : cfg.test_ms)
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "test M must be positive");

  // training set
  std::vector<DiscreteMeasure> centers;
  RealVector targets(cfg.n_train);
  for (int i = 0; i < cfg.n_train; ++i) {
    Rng rng = make_rng({cfg.seed, kStreamTrain, static_cast<std::uint64_t>(i)});
    const auto law = cfg.family.draw_law(rng);
    const auto x = sample_configuration(law, cfg.train_m, rng);
    targets[i] = eval_observable(cfg.observable, x);
    centers.push_back(empirical_measure(x));
  }
  const RidgeFit fit = ridge_fit(cfg.kernel, centers, targets, cfg.lambda);
  const double constant = targets.mean();

  auto evaluate = [&](std::int64_t m) {
    std::vector<double> pred(static_cast<std::size_t>(cfg.n_test)), truth(pred.size()), base(pred.size());
    std::vector<double> gap(pred.size());
    bool have_gap = true;
    std::vector<SamplerSpec> laws;
    std::vector<ParticleConfiguration> xs;
    for (int i = 0; i < cfg.n_test; ++i) {
      Rng rng = make_rng({cfg.seed, kStreamTest, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(i)});
      laws.push_back(cfg.family.draw_law(rng));
      xs.push_back(sample_configuration(laws.back(), m, rng));
    }
    parallel_for(cfg.n_test, [&](std::ptrdiff_t i) {
      truth[i] = eval_observable(cfg.observable, xs[i]);
      pred[i] = expansion_eval(fit.model, empirical_measure(xs[i]));
      base[i] = constant;
    });
    for (int i = 0; i < cfg.n_test && have_gap; ++i) {
      try {
        gap[i] = std::abs(truth[i] - observable_population_limit(cfg.observable, laws[i]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnknownLimit) throw;
        have_gap = false;
      }
    }
    TransferRow row{m, rmse(pred, truth), rmse(base, truth), std::nullopt};
    if (have_gap) row.mean_field_gap = median(gap);
    return row;
  };

  TransferReport report;
  report.train_m = cfg.train_m;
  report.n_train = cfg.n_train;
  report.n_test = cfg.n_test;
  report.lambda = cfg.lambda;
  report.jitter = fit.jitter;
  report.in_distribution_rmse = evaluate(cfg.train_m).rmse;
  for (auto m : cfg.test_ms) report.rows.push_back(evaluate(m));
  return report;
}

}  // namespace mfk
