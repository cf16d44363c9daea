#include "mfk/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "mfk/errors.hpp"
#include "mfk/kernels.hpp"
#include "mfk/mcshane.hpp"
#include "mfk/modulus.hpp"
#include "mfk/particles.hpp"
#include "mfk/rkhs.hpp"
#include "mfk/sampler.hpp"
#include "mfk/transport.hpp"

namespace mfk {

namespace {

std::string fmt(const char* label, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.3e", label, v);
  return buf;
}

DiscreteMeasure random_measure(Rng& rng, Eigen::Index n, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd atoms(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) atoms(i, j) = u(rng);
  RealVector w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = u(rng) + 0.05;
  w /= w.sum();
  w[n - 1] = 1.0 - (w.sum() - w[n - 1]);
  return DiscreteMeasure(atoms, w);
}

SelftestCheck permutation_invariance() {
  const auto box = DomainBox::unit(2);
  const auto sampler = SamplerSpec::uniform(box);
  const std::vector<DistributionKernelSpec> kernels{
      DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(0.5)),
      DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(0.5), FeatureMapSpec::mean())};
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto rng = make_rng({11, static_cast<std::uint64_t>(t)});
    const auto x = sample_configuration(sampler, 17, rng);
    const auto y = sample_configuration(sampler, 9, rng);
    std::vector<Eigen::Index> perm(17);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (const auto& k : kernels) worst = std::max(worst, std::abs(k(x.permuted(perm), y) - k(x, y)));
  }
  return {"permutation invariance", worst <= 1e-12, fmt("max deviation", worst)};
}

SelftestCheck kme_identity() {
  const auto base = BaseKernelSpec::gaussian(0.3);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto rng = make_rng({12, static_cast<std::uint64_t>(t)});
    const auto mu = random_measure(rng, 5, 2);
    const auto nu = random_measure(rng, 4, 2);
    double naive = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j) naive += nu.weight(j) * kme_eval(base, mu, nu.atom(j));
    const double ds = eval_double_sum(base, mu, nu);
    worst = std::max(worst, std::abs(ds - naive) / std::max(std::abs(naive), 1e-300));
  }
  return {"double sum equals KME inner product", worst <= 1e-12, fmt("max relative error", worst)};
}

SelftestCheck transport_oracles() {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto rng = make_rng({13, static_cast<std::uint64_t>(t)});
    const auto mu = random_measure(rng, 1 + t % 4, 1);
    const auto nu = random_measure(rng, 1 + (t / 4) % 4, 1);
    const double exact = w1_exact(mu, nu).distance;
    worst = std::max({worst, std::abs(exact - w1_bruteforce(mu, nu)), std::abs(exact - w1_1d(mu, nu))});
  }
  return {"exact W1 matches brute force and 1-d formula", worst <= 1e-9, fmt("max deviation", worst)};
}

SelftestCheck gram_psd() {
  const auto box = DomainBox::unit(2);
  const auto sampler = SamplerSpec::uniform(box);
  double worst = 0.0;
  bool pass = true;
  for (const auto& k : {DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(0.2)),
                        DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(0.2), FeatureMapSpec::mean())}) {
    std::vector<DiscreteMeasure> centers;
    for (int i = 0; i < 12; ++i) centers.push_back(empirical_measure(sample_configuration(sampler, 8, 100 + i)));
    const auto r = psd_check(gram(k, centers), 1e-8);
    pass = pass && r.pass;
    worst = std::min(worst, r.min_eigenvalue);
  }
  return {"Gram matrices are PSD", pass, fmt("most negative eigenvalue", worst)};
}

SelftestCheck mcshane_atomic() {
  const auto box = DomainBox::unit(1);
  const auto sampler = SamplerSpec::uniform(box);
  const auto k = DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(0.5), FeatureMapSpec::mean());
  const auto omega = *analytic_modulus(k, box);
  std::vector<ConfigurationPair> candidates;
  for (int i = 0; i < 8; ++i)
    candidates.emplace_back(sample_configuration(sampler, 6, 200 + 2 * i), sample_configuration(sampler, 6, 201 + 2 * i));
  double worst = 0.0;
  for (const auto& [x, y] : candidates) {
    const MeasurePair target{empirical_measure(x), empirical_measure(y)};
    worst = std::max(worst, std::abs(mcshane_extension(k, 6, omega, target, candidates) - k(x, y)));
  }
  return {"McShane extension is exact at candidate pairs", worst <= 1e-12, fmt("max deviation", worst)};
}

SelftestCheck reproducing_property() {
  const auto k = DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(0.4));
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto rng = make_rng({14, static_cast<std::uint64_t>(t)});
    std::vector<DiscreteMeasure> centers;
    RealVector alpha(5);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 5; ++i) {
      centers.push_back(random_measure(rng, 3, 2));
      alpha[i] = n01(rng);
    }
    const Expansion f(centers, alpha, k);
    const auto mu = random_measure(rng, 4, 2);
    worst = std::max(worst, std::abs(expansion_inner(f, Expansion::section(k, mu)) - expansion_eval(f, mu)));
  }
  return {"reproducing property", worst <= 1e-12, fmt("max deviation", worst)};
}

SelftestCheck mmd_dominance() {
  const auto base = BaseKernelSpec::gaussian(0.5);
  const auto metric = GroundMetric::kernel(base);
  double worst = -1.0;
  for (int t = 0; t < 50; ++t) {
    auto rng = make_rng({15, static_cast<std::uint64_t>(t)});
    const auto mu = random_measure(rng, 4, 2);
    const auto nu = random_measure(rng, 3, 2);
    worst = std::max(worst, mmd(base, mu, nu) - w1_exact(mu, nu, metric).distance);
  }
  return {"MMD is dominated by kernel-metric W1", worst <= 1e-9, fmt("max excess", worst)};
}

SelftestCheck observable_consistency() {
  const auto box = DomainBox::unit(2);
  const auto sampler = SamplerSpec::uniform(box);
  const std::vector<ObservableSpec> observables{ObservableSpec(CoordinateMeanObservable{}),
                                                ObservableSpec(VarianceObservable{}),
                                                ObservableSpec(InteractionEnergyObservable{GaussianPotential{0.5}})};
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto x = sample_configuration(sampler, 13, 300 + t);
    for (const auto& o : observables)
      worst = std::max(worst, std::abs(eval_observable(o, x) - observable_limit(o, empirical_measure(x))));
  }
  return {"observables agree with their measure-level limits", worst <= 1e-13, fmt("max deviation", worst)};
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  const std::vector<std::function<SelftestCheck()>> checks{
      permutation_invariance, kme_identity,         transport_oracles, gram_psd,
      mcshane_atomic,         reproducing_property, mmd_dominance,     observable_consistency};
  std::vector<SelftestCheck> out;
  for (const auto& c : checks) {
    try {
      out.push_back(c());
    } catch (const std::exception& e) {
      out.push_back({"(check threw)", false, e.what()});
    }
  }
  return out;
}

}  // namespace mfk
