#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mfk/errors.hpp"
#include "mfk/kernels.hpp"
#include "mfk/mcshane.hpp"
#include "mfk/modulus.hpp"
#include "mfk/transport.hpp"

using namespace mfk;
using namespace mfk::testing;

namespace {

// Extended-precision values (30 digits, mpmath).
constexpr double kExpMinusOne = 0.367879441171442321595523770161;
constexpr double kSqrtTwoMinusTwoExpMinusOne = 1.12438477295680029891648410179;

long double naive_double_sum(const BaseKernelSpec& base, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < nu.size(); ++j) acc += static_cast<long double>(mu.weight(i)) * nu.weight(j) * base(mu.atom(i), nu.atom(j));
  return acc;
}

std::vector<DistributionKernelSpec> both_families(double gamma) {
  return {DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(gamma)),
          DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(gamma), FeatureMapSpec::mean())};
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("gaussian base kernel") {
  const auto k = BaseKernelSpec::gaussian(0.5);
  const Point x = pt({0.2, 0.4}), y = pt({0.2, 1.4});
  CHECK(eval_base(k, x, x) == 1.0);
  CHECK(eval_base(k, x, y) == doctest::Approx(kExpMinusOne).epsilon(1e-15));
  CHECK(eval_base(k, x, y) == eval_base(k, y, x));
  CHECK(k.bound() == 1.0);
  MFK_CHECK_ERROR(eval_base(k, x, pt({0.0})), ErrorCode::DimensionMismatch);
  MFK_CHECK_ERROR(BaseKernelSpec::gaussian(0.0), ErrorCode::InvalidArgument);
}

TEST_CASE("inverse multiquadric base kernel") {
  const auto k = BaseKernelSpec::inverse_multiquadric(2.0);
  CHECK(eval_base(k, pt({0.0}), pt({0.0})) == 0.5);
  CHECK(eval_base(k, pt({0.0}), pt({1.5})) == doctest::Approx(1.0 / 2.5).epsilon(1e-15));
  CHECK(k.bound() == 0.5);
}

TEST_CASE("table kernels snap to the grid") {
  Eigen::MatrixXd grid(1, 2);
  grid << 0.0, 1.0;
  Eigen::MatrixXd values(2, 2);
  values << 2.0, 0.5, 0.5, 1.0;
  const BaseKernelSpec k(TableKernel{grid, values});
  CHECK(k(pt({0.1}), pt({0.9})) == 0.5);
  CHECK(k(pt({0.9}), pt({0.8})) == 1.0);
  CHECK(k.bound() == 2.0);
  CHECK_FALSE(k.lipschitz().has_value());
  const auto c = BaseKernelSpec::constant(3.0, 2);
  CHECK(c(pt({0.0, 0.0}), pt({0.7, 0.1})) == 3.0);
  Eigen::MatrixXd asym = values;
  asym(0, 1) = 0.2;
  MFK_CHECK_ERROR(BaseKernelSpec(TableKernel{grid, asym}), ErrorCode::NonSymmetricInput);
}

TEST_CASE("kernel metric") {
  const auto k = BaseKernelSpec::gaussian(0.5);
  CHECK(kernel_metric(k, pt({0.3}), pt({0.3})) == 0.0);
  const Point x = pt({0.0, 0.0}), y = pt({0.6, 0.8});
  CHECK(kernel_metric(k, x, y) == doctest::Approx(std::sqrt(2.0 - 2.0 * std::exp(-1.0))).epsilon(1e-15));
  CHECK(kernel_metric(k, pt({0.0}), pt({1.0})) == doctest::Approx(kSqrtTwoMinusTwoExpMinusOne).epsilon(1e-15));
  Eigen::MatrixXd grid(1, 2);
  grid << 0.0, 1.0;
  Eigen::MatrixXd values(2, 2);
  values << 0.0, 1.0, 1.0, 0.0;
  MFK_CHECK_ERROR(kernel_metric(BaseKernelSpec(TableKernel{grid, values}), pt({0.0}), pt({1.0})),
                  ErrorCode::NegativeRadicand);
}

TEST_CASE("double sum examples") {
  const auto base = BaseKernelSpec::gaussian(0.3);
  const Point x = pt({0.1, 0.5}), y = pt({0.8, 0.2});
  CHECK(eval_double_sum(base, DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(y)) == base(x, y));
  auto rng = make_rng({301});
  const auto nu = random_measure(rng, 4, 2);
  const auto dup = empirical_measure(ParticleConfiguration(Eigen::MatrixXd(x.replicate(1, 2))));
  CHECK(eval_double_sum(base, dup, nu) == doctest::Approx(eval_double_sum(base, DiscreteMeasure::dirac(x), nu)).epsilon(1e-15));
  const auto mu3 = random_measure(rng, 3, 2), nu2 = random_measure(rng, 2, 2);
  CHECK(std::abs(eval_double_sum(base, mu3, nu2) - static_cast<double>(naive_double_sum(base, mu3, nu2))) <= 1e-15);
  MFK_CHECK_ERROR(eval_double_sum(base, DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(pt({0.0}))),
                  ErrorCode::DimensionMismatch);
}

TEST_CASE("serial and parallel double sums agree bitwise") {
  const auto base = BaseKernelSpec::gaussian(0.3);
  auto rng = make_rng({302});
  const auto mu = random_measure(rng, 300, 2), nu = random_measure(rng, 200, 2);
  CHECK(eval_double_sum(base, mu, nu) == serial::double_sum(base, mu, nu));
}

TEST_CASE("pullback examples") {
  const auto base = BaseKernelSpec::gaussian(0.5);
  auto rng = make_rng({303});
  const auto mu = random_measure(rng, 5, 2), nu = random_measure(rng, 3, 2);
  CHECK(eval_pullback(base, FeatureMapSpec::mean(), mu, nu) == base(measure_mean(mu), measure_mean(nu)));
  CHECK(eval_pullback(base, FeatureMapSpec::mean(), mu, mu) == 1.0);
  // Equal means: the mean map is not injective.
  CHECK(eval_pullback(base, FeatureMapSpec::mean(), measure_1d({0.0, 1.0}, {0.5, 0.5}), measure_1d({0.5}, {1.0})) == 1.0);
}

TEST_CASE("kernel mean embedding") {
  const auto base = BaseKernelSpec::gaussian(0.4);
  const Point x = pt({0.2}), y = pt({0.9});
  CHECK(kme_eval(base, DiscreteMeasure::dirac(y), x) == base(x, y));
  CHECK(kme_eval(base, measure_1d({0.0, 1.0}, {0.5, 0.5}), x) ==
        doctest::Approx(0.5 * (base(x, pt({0.0})) + base(x, pt({1.0})))).epsilon(1e-15));
  auto rng = make_rng({304});
  for (int t = 0; t < 100; ++t) {
    const auto mu = random_measure(rng, 1 + t % 10, 2);
    const Point xbar = random_measure(rng, 1, 2).atom(0);
    // Constant configuration e(xbar) = (xbar, ..., xbar).
    const auto constant = empirical_measure(ParticleConfiguration(Eigen::MatrixXd(xbar.replicate(1, 7))));
    CHECK(std::abs(kme_eval(base, mu, xbar) - eval_double_sum(base, constant, mu)) <= 1e-14);
  }
}

TEST_CASE("mmd") {
  const auto base = BaseKernelSpec::gaussian(0.5);
  auto rng = make_rng({305});
  const auto mu = random_measure(rng, 6, 2);
  CHECK(mmd(base, mu, mu) == 0.0);
  const Point x = pt({0.1, 0.1}), y = pt({0.5, 0.9});
  CHECK(mmd(base, DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(y)) == doctest::Approx(kernel_metric(base, x, y)).epsilon(1e-14));
  CHECK(mmd(base, DiscreteMeasure::dirac(pt({0.0})), DiscreteMeasure::dirac(pt({1.0}))) ==
        doctest::Approx(kSqrtTwoMinusTwoExpMinusOne).epsilon(1e-14));
}

TEST_CASE("permutation invariance") {
  auto rng = make_rng({306});
  const auto kernels = both_families(0.3);
  for (int t = 0; t < 300; ++t) {
    const auto x = random_config(rng, 1 + t % 64, 2), y = random_config(rng, 1 + (t * 7) % 64, 2);
    const auto perm = random_permutation(rng, x.size());
    for (const auto& k : kernels) CHECK(std::abs(k(x.permuted(perm), y) - k(x, y)) <= 1e-12);
  }
}

TEST_CASE("uniform boundedness") {
  auto rng = make_rng({307});
  std::uniform_int_distribution<Eigen::Index> msize(1, 256);
  const auto kernels = both_families(0.2);
  const auto imq = DistributionKernelSpec::double_sum(BaseKernelSpec::inverse_multiquadric(0.5));
  for (int t = 0; t < 10000; ++t) {
    const auto x = random_config(rng, msize(rng), 2), y = random_config(rng, t % 4 == 0 ? msize(rng) : 4, 2);
    const auto& k = kernels[static_cast<std::size_t>(t % 2)];
    const double v = k(x, y);
    CHECK((v >= 0.0 && v <= 1.0));
    if (t % 50 == 0) CHECK(std::abs(imq(x, y)) <= imq.bound());
  }
}

TEST_CASE("double sum equals the KME inner product") {
  auto rng = make_rng({308});
  const auto base = BaseKernelSpec::gaussian(0.25);
  for (int t = 0; t < 300; ++t) {
    const auto mu = random_measure(rng, 1 + t % 13, 3), nu = random_measure(rng, 1 + t % 11, 3);
    // <KME(nu), KME(mu)>: evaluate KME(mu) at the atoms of nu, then weight by nu.
    long double inner = 0.0L;
    for (Eigen::Index j = 0; j < nu.size(); ++j) inner += static_cast<long double>(nu.weight(j)) * kme_eval(base, mu, nu.atom(j));
    const double ds = eval_double_sum(base, mu, nu);
    CHECK(std::abs(ds - static_cast<double>(inner)) <= 1e-12 * std::abs(static_cast<double>(inner)));
  }
}

TEST_CASE("continuity bound under the kernel metric") {
  auto rng = make_rng({309});
  const auto base = BaseKernelSpec::gaussian(0.3);
  const auto k = DistributionKernelSpec::double_sum(base);
  const auto metric = GroundMetric::kernel(base);
  for (int t = 0; t < 200; ++t) {
    const auto m = 1 + t % 12;
    const auto x1 = empirical_measure(random_config(rng, m, 2)), y1 = empirical_measure(random_config(rng, m, 2));
    const auto x2 = empirical_measure(random_config(rng, m, 2)), y2 = empirical_measure(random_config(rng, m, 2));
    const double lhs = std::abs(k(x1, y1) - k(x2, y2));
    CHECK(lhs <= std::sqrt(base.bound()) * dkr2({x1, y1}, {x2, y2}, metric) + 1e-9);
  }
}

TEST_CASE("mmd is dominated by kernel-metric W1") {
  auto rng = make_rng({310});
  const auto base = BaseKernelSpec::gaussian(0.5);
  const auto metric = GroundMetric::kernel(base);
  for (int t = 0; t < 200; ++t) {
    const auto mu = empirical_measure(random_config(rng, 1 + t % 16, 2));
    const auto nu = empirical_measure(random_config(rng, 1 + t % 9, 2));
    CHECK(mmd(base, mu, nu) <= w1_exact(mu, nu, metric).distance + 1e-9);
  }
}

TEST_CASE("feature maps are symmetric and Lipschitz in W1") {
  const auto box = DomainBox::unit(2);
  Eigen::MatrixXd grid(2, 4);
  grid << 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0;
  const std::vector<FeatureMapSpec> maps{FeatureMapSpec::mean(), FeatureMapSpec::moments(3),
                                         FeatureMapSpec(SoftHistogramFeature{grid, 0.3})};
  auto rng = make_rng({311});
  for (const auto& phi : maps) {
    CHECK(phi.output_dim(2) == phi(empirical_measure(random_config(rng, 3, 2))).size());
    for (int t = 0; t < 100; ++t) {
      const auto x = random_config(rng, 1 + t % 10, 2), y = random_config(rng, 1 + t % 7, 2);
      const auto ex = empirical_measure(x), ey = empirical_measure(y);
      CHECK((phi(empirical_measure(x.permuted(random_permutation(rng, x.size())))) - phi(ex)).norm() <= 1e-14);
      CHECK((phi(ex) - phi(ey)).norm() <= phi.lipschitz(box) * w1_exact(ex, ey).distance + 1e-12);
    }
  }
}

TEST_CASE("analytic moduli") {
  const auto box = DomainBox::unit(2);
  const auto pull = analytic_modulus(DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(0.5), FeatureMapSpec::mean()), box);
  REQUIRE(pull.has_value());
  CHECK(pull->slope() == doctest::Approx(std::exp(-0.5) / std::sqrt(0.5)).epsilon(1e-15));
  CHECK(std::holds_alternative<EuclideanMetric>(pull->metric().kind()));
  const auto ds = analytic_modulus(DistributionKernelSpec::double_sum(BaseKernelSpec::inverse_multiquadric(0.25)), box);
  REQUIRE(ds.has_value());
  CHECK(ds->slope() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::holds_alternative<KernelMetric>(ds->metric().kind()));
  CHECK_FALSE(analytic_modulus(DistributionKernelSpec::double_sum(BaseKernelSpec::constant(1.0, 2)), box).has_value());
}

TEST_CASE("piecewise moduli must be concave and nondecreasing") {
  CHECK_NOTHROW(Modulus::piecewise({{1.0, 1.0}, {2.0, 1.5}, {3.0, 1.5}}, GroundMetric()));
  MFK_CHECK_ERROR(Modulus::piecewise({{1.0, 1.0}, {2.0, 3.0}}, GroundMetric()), ErrorCode::ModulusNotConcave);
  MFK_CHECK_ERROR(Modulus::piecewise({{1.0, 1.0}, {2.0, 0.5}}, GroundMetric()), ErrorCode::ModulusNotConcave);
  const auto w = Modulus::piecewise({{1.0, 2.0}, {3.0, 3.0}}, GroundMetric());
  CHECK(w(0.0) == 0.0);
  CHECK(w(0.5) == 1.0);
  CHECK(w(2.0) == 2.5);
  CHECK(w(10.0) == 3.0);
}

TEST_CASE("concave majorant dominates its samples") {
  auto rng = make_rng({312});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ModulusSample> samples;
  for (int i = 0; i < 200; ++i) {
    const double r = u(rng);
    samples.push_back({r, std::sqrt(r) * u(rng)});
  }
  const auto env = concave_majorant(samples, GroundMetric());
  for (const auto& s : samples) CHECK(env(s.distance) >= s.deviation - 1e-15);
  double prev = 0.0, prev_slope = INFINITY;
  for (int i = 1; i <= 100; ++i) {
    const double r = i / 100.0, v = env(r);
    CHECK(v >= prev);
    const double slope = (v - prev) * 100.0;
    CHECK(slope <= prev_slope + 1e-9);
    prev = v;
    prev_slope = slope;
  }
}

TEST_CASE("modulus estimates") {
  const auto box = DomainBox::unit(2);
  const auto sampler = SamplerSpec::uniform(box);
  SUBCASE("constant kernel has zero modulus") {
    const auto est = estimate_modulus(DistributionKernelSpec::double_sum(BaseKernelSpec::constant(1.0, 2)), 5, sampler, 50, 9);
    for (const auto& s : est.samples) CHECK(s.deviation == 0.0);
    CHECK(est.envelope(0.5) == 0.0);
    CHECK(est.envelope(100.0) == 0.0);
  }
  SUBCASE("pullback mean gaussian respects the analytic constant") {
    const double gamma = 0.5;
    const auto k = DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(gamma), FeatureMapSpec::mean());
    const auto est = estimate_modulus(k, 6, sampler, 300, 10);
    const double tight = std::exp(-0.5) / std::sqrt(gamma);
    const double stated = std::sqrt(2.0) * tight;  // sqrt(d) variant of the same bound
    for (const auto& s : est.samples) {
      CHECK(s.deviation <= tight * s.distance + 1e-12);
      CHECK(s.deviation <= stated * s.distance + 1e-12);
      CHECK(est.envelope(s.distance) >= s.deviation);
    }
  }
  SUBCASE("more trials only raise the envelope") {
    const auto k = DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(0.3));
    const auto a = estimate_modulus(k, 4, sampler, 40, 11);
    const auto b = estimate_modulus(k, 4, sampler, 80, 11);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].distance == b.samples[i].distance);
      CHECK(a.samples[i].deviation == b.samples[i].deviation);
    }
    for (int i = 0; i <= 200; ++i) CHECK(b.envelope(i / 50.0) >= a.envelope(i / 50.0));
  }
  MFK_CHECK_ERROR(estimate_modulus(DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(1.0)), 3, sampler, 9, 0),
                  ErrorCode::InvalidArgument);
}

TEST_CASE("McShane extension") {
  const auto box = DomainBox::unit(1);
  const auto sampler = SamplerSpec::uniform(box);
  const auto k = DistributionKernelSpec::pullback(BaseKernelSpec::gaussian(0.5), FeatureMapSpec::mean());
  const auto omega = *analytic_modulus(k, box);
  std::vector<ConfigurationPair> candidates;
  for (int i = 0; i < 12; ++i)
    candidates.emplace_back(sample_configuration(sampler, 5, 400 + 2 * i), sample_configuration(sampler, 5, 401 + 2 * i));

  SUBCASE("exact at the empirical pair of a candidate") {
    for (const auto& [x, y] : candidates) {
      const MeasurePair target{empirical_measure(x), empirical_measure(y)};
      CHECK(std::abs(mcshane_extension(k, 5, omega, target, candidates) - k(x, y)) <= 1e-12);
    }
  }
  SUBCASE("growing candidate sets never increase the value") {
    const MeasurePair target{empirical_measure(sample_configuration(sampler, 3, 1)),
                             empirical_measure(sample_configuration(sampler, 7, 2))};
    double prev = INFINITY;
    for (std::size_t n = 1; n <= candidates.size(); ++n) {
      const std::vector<ConfigurationPair> subset(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n));
      const double v = mcshane_extension(k, 5, omega, target, subset);
      CHECK(v <= prev);
      prev = v;
      double lower = INFINITY;
      for (const auto& [x, y] : subset) lower = std::min(lower, k(x, y));
      CHECK(v >= lower);
    }
  }
  SUBCASE("a single candidate adds the modulus of its distance") {
    const auto& [x, y] = candidates.front();
    const MeasurePair target{DiscreteMeasure::dirac(pt({0.2})), DiscreteMeasure::dirac(pt({0.9}))};
    const double r = dkr2({empirical_measure(x), empirical_measure(y)}, target, omega.metric());
    CHECK(mcshane_extension(k, 5, omega, target, {candidates.front()}) == k(x, y) + omega(r));
  }
  MFK_CHECK_ERROR(mcshane_extension(k, 5, omega, {DiscreteMeasure::dirac(pt({0.0})), DiscreteMeasure::dirac(pt({0.0}))}, {}),
                  ErrorCode::EmptyCandidates);
  MFK_CHECK_ERROR(mcshane_extension(k, 4, omega, {DiscreteMeasure::dirac(pt({0.0})), DiscreteMeasure::dirac(pt({0.0}))}, candidates),
                  ErrorCode::InvalidArgument);
}

}  // TEST_SUITE
