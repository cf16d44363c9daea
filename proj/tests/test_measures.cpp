#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mfk/errors.hpp"
#include "mfk/measures.hpp"
#include "mfk/sampler.hpp"

using namespace mfk;
using namespace mfk::testing;

TEST_SUITE("measures") {

TEST_CASE("empirical measure of a single particle is a Dirac") {
  const auto mu = empirical_measure(ParticleConfiguration(Eigen::MatrixXd::Constant(2, 1, 0.3)));
  CHECK(mu.size() == 1);
  CHECK(mu.weight(0) == 1.0);
  CHECK(mu.atom(0) == pt({0.3, 0.3}));
}

TEST_CASE("duplicated particles are kept and integrate like one atom") {
  const Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(1, 2, 0.7);
  const auto mu = empirical_measure(ParticleConfiguration(pts));
  REQUIRE(mu.size() == 2);
  CHECK(mu.weight(0) == 0.5);
  CHECK(mu.weight(1) == 0.5);
  const auto dirac = DiscreteMeasure::dirac(pt({0.7}));
  auto phi = [](const auto& x) { return std::sin(3.0 * x[0]) + x[0] * x[0]; };
  CHECK(integrate(mu, phi) == doctest::Approx(integrate(dirac, phi)).epsilon(1e-15));
  const auto merged = mu.coalesce();
  CHECK(merged.size() == 1);
  CHECK(merged.weight(0) == 1.0);
}

TEST_CASE("empirical weights are uniform") {
  Eigen::MatrixXd pts(1, 3);
  pts << 0.0, 1.0, 2.0;
  const auto mu = empirical_measure(ParticleConfiguration(pts));
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(mu.weight(i) == 1.0 / 3.0);
}

TEST_CASE("measure mean") {
  CHECK(measure_mean(measure_1d({0.0, 1.0}, {0.5, 0.5}))[0] == 0.5);
  const Point x = pt({0.1, -2.5, 7.0});
  CHECK(measure_mean(DiscreteMeasure::dirac(x)) == x);
  // Hand evaluation 0 * 0.25 + 1 * 0.75, cross-checked below by a plain loop.
  const auto mu = measure_1d({0.0, 1.0}, {0.25, 0.75});
  CHECK(measure_mean(mu)[0] == 0.75);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) acc += mu.weight(i) * mu.atom(i)[0];
  CHECK(acc == 0.75);
}

TEST_CASE("mean of an empirical measure matches the arithmetic mean") {
  auto rng = make_rng({101});
  for (int t = 0; t < 200; ++t) {
    const auto x = random_config(rng, 1 + t % 97, 3);
    const RealVector mean = measure_mean(empirical_measure(x));
    const RealVector expect = x.points().rowwise().mean();
    for (Eigen::Index c = 0; c < 3; ++c) CHECK(std::abs(mean[c] - expect[c]) <= 1e-14 * std::max(1.0, std::abs(expect[c])));
  }
}

TEST_CASE("empirical measure is permutation covariant") {
  auto rng = make_rng({102});
  for (int t = 0; t < 50; ++t) {
    const auto x = random_config(rng, 9, 2);
    const auto perm = random_permutation(rng, 9);
    const auto a = empirical_measure(x);
    const auto b = empirical_measure(x.permuted(perm));
    // Same multiset of (atom, weight) pairs.
    for (Eigen::Index i = 0; i < 9; ++i) {
      CHECK(b.atom(i) == a.atom(perm[static_cast<std::size_t>(i)]));
      CHECK(b.weight(i) == a.weight(perm[static_cast<std::size_t>(i)]));
    }
  }
}

TEST_CASE("sampling is deterministic per seed") {
  const auto s = SamplerSpec::uniform(DomainBox::unit(1));
  const auto a = sample_configuration(s, 3, 7);
  const auto b = sample_configuration(s, 3, 7);
  CHECK(a.points() == b.points());
  CHECK(sample_configuration(s, 3, 8).points() != a.points());
}

TEST_CASE("uniform sample mean is close to the centre") {
  const auto x = sample_configuration(SamplerSpec::uniform(DomainBox::unit(1)), 10000, 1);
  CHECK(std::abs(measure_mean(empirical_measure(x))[0] - 0.5) <= 0.02);
  // Independent check with a separately seeded generator.
  std::mt19937_64 other(424242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < 10000; ++i) acc += u(other);
  CHECK(std::abs(acc / 10000 - 0.5) <= 0.02);
}

TEST_CASE("degenerate boxes are rejected") {
  MFK_CHECK_ERROR(DomainBox(pt({0.3}), pt({0.3})), ErrorCode::InvalidBox);
  MFK_CHECK_ERROR(DomainBox(pt({1.0}), pt({0.0})), ErrorCode::InvalidBox);
  MFK_CHECK_ERROR(DomainBox(pt({0.0}), pt({INFINITY})), ErrorCode::InvalidBox);
}

TEST_CASE("samplers must stay inside their domain") {
  const auto unit = DomainBox::unit(1);
  MFK_CHECK_ERROR(SamplerSpec(UniformBoxSampler{DomainBox(pt({-0.5}), pt({0.5}))}, unit), ErrorCode::AtomOutsideDomain);
  MFK_CHECK_ERROR(SamplerSpec(DiracSampler{pt({2.0})}, unit), ErrorCode::AtomOutsideDomain);
}

TEST_CASE("every sampler kind draws inside the domain") {
  const auto unit = DomainBox::unit(2);
  const std::vector<SamplerSpec> samplers{
      SamplerSpec::uniform(unit),
      SamplerSpec(TruncatedNormalSampler{pt({0.5, 0.2}), pt({0.1, 0.4}), unit}, unit),
      SamplerSpec(BoxMixtureSampler{{DomainBox(pt({0.0, 0.0}), pt({0.2, 0.2})), DomainBox(pt({0.7, 0.7}), pt({1.0, 1.0}))},
                                    {0.3, 0.7}},
                  unit),
      SamplerSpec(DiracSampler{pt({0.25, 0.75})}, unit)};
  for (const auto& s : samplers) {
    const auto x = sample_configuration(s, 500, 3);
    CHECK_NOTHROW(validate_configuration(x, unit));
    CHECK_NOTHROW(validate_measure(empirical_measure(x), unit));
  }
}

TEST_CASE("validate_measure") {
  CHECK_NOTHROW(measure_1d({0.0, 1.0}, {0.5, 0.5}));
  MFK_CHECK_ERROR(measure_1d({0.0, 1.0}, {0.5, 0.6}), ErrorCode::WeightSumOffByMoreThanTolerance);
  MFK_CHECK_ERROR(measure_1d({0.0, 1.0}, {-0.1, 1.1}), ErrorCode::NegativeWeight);
  MFK_CHECK_ERROR(DiscreteMeasure(Eigen::MatrixXd(1, 0), RealVector(0)), ErrorCode::EmptySupport);
  MFK_CHECK_ERROR(validate_measure(measure_1d({0.0, 1.5}, {0.5, 0.5}), DomainBox::unit(1)), ErrorCode::AtomOutsideDomain);
  MFK_CHECK_ERROR(measure_1d({0.0, 1.0}, {0.5}), ErrorCode::DimensionMismatch);
  MFK_CHECK_ERROR(measure_1d({0.0, NAN}, {0.5, 0.5}), ErrorCode::NonFiniteValue);
}

TEST_CASE("weight drift below the tolerance is accepted") {
  CHECK_NOTHROW(measure_1d({0.0, 1.0}, {0.5, 0.5 + 5e-13}));
  MFK_CHECK_ERROR(measure_1d({0.0, 1.0}, {0.5, 0.5 + 5e-12}), ErrorCode::WeightSumOffByMoreThanTolerance);
}

TEST_CASE("zero weights can be dropped") {
  const auto mu = measure_1d({0.0, 0.5, 1.0}, {0.5, 0.0, 0.5});
  const auto nz = mu.without_zero_weights();
  CHECK(nz.size() == 2);
  CHECK(nz.atom(1)[0] == 1.0);
}

}  // TEST_SUITE
