#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfk/kernels.hpp"
#include "mfk/particles.hpp"
#include "mfk/rkhs.hpp"
#include "mfk/sampler.hpp"

namespace mfk {

// Identifies the run that produced a report.
struct Provenance {
  std::string version;
  std::string config_hash;
  std::string config_json;  // compact dump of the resolved config

  bool operator==(const Provenance&) const = default;
};

struct ErrorStats {
  std::int64_t m = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;

  bool operator==(const ErrorStats&) const = default;
};

inline constexpr int kMinSeedsPerM = 8;

struct ConvergenceReport {
  std::vector<std::int64_t> m_grid;
  std::vector<ErrorStats> stats;  // one per grid point
  // Least-squares slope of log(median) on log(M); unset when a median is zero.
  std::optional<double> slope;
  double limit_value = 0.0;
  std::vector<std::uint64_t> seeds;
  std::string note;
  Provenance provenance;

  bool operator==(const ConvergenceReport&) const = default;
};

/// For each M and seed draws x ~ mu^M, x' ~ nu^M and records
/// |k^[M](x, x') - k(mu, nu)| against the explicit population limit:
/// pullback -> k0(phi(mu), phi(nu)), double sum -> iint k0 dmu dnu (quadrature).
/// Throws UnknownLimit for families without an explicit limit.
ConvergenceReport kernel_convergence_study(const DistributionKernelSpec& kspec, const SamplerSpec& mu,
                                           const SamplerSpec& nu, const std::vector<std::int64_t>& m_grid,
                                           int n_seeds, std::uint64_t base_seed);

struct McShaneCheckReport {
  double max_deviation = 0.0;
  std::vector<double> deviations;
  bool modulus_violation = false;  // some decoy undercut the pair's own kernel value
  int n_pairs = 0;
  int n_decoys = 0;
  double modulus_scale = 1.0;
};

/// Evaluates the candidate-set McShane extension at each sampled pair's own
/// empirical measures, with the pair plus n_decoys random candidate pairs.
McShaneCheckReport mcshane_consistency_check(const DistributionKernelSpec& kspec, Eigen::Index m, int n_pairs,
                                             std::uint64_t seed, const SamplerSpec& sampler, int n_decoys = 32,
                                             double modulus_scale = 1.0);

// Random truncated-normal laws on a box: per configuration a mean and a
// standard deviation are drawn uniformly from the given ranges (all coordinates).
struct LawFamily {
  DomainBox domain;
  double mean_lo, mean_hi;
  double sd_lo, sd_hi;

  SamplerSpec draw_law(Rng& rng) const;
};

struct TransferConfig {
  DistributionKernelSpec kernel;
  ObservableSpec observable;
  LawFamily family;
  std::int64_t train_m = 32;
  std::vector<std::int64_t> test_ms;
  int n_train = 200;
  int n_test = 100;
  double lambda = 1e-6;
  std::uint64_t seed = 0;
};

struct TransferRow {
  std::int64_t m = 0;
  double rmse = 0.0;
  double baseline_rmse = 0.0;
  // median |f_M(x) - f(law)| over the test set; unset when f(law) has no oracle
  std::optional<double> mean_field_gap;

  bool operator==(const TransferRow&) const = default;
};

struct TransferReport {
  std::int64_t train_m = 0;
  int n_train = 0;
  int n_test = 0;
  double lambda = 0.0;
  double jitter = 0.0;
  double in_distribution_rmse = 0.0;
  std::vector<TransferRow> rows;
  Provenance provenance;

  bool operator==(const TransferReport&) const = default;
};

TransferReport functional_transfer_study(const TransferConfig& config);

}  // namespace mfk
