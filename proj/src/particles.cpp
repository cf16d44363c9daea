#include "mfk/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfk/errors.hpp"
#include "mfk/numeric.hpp"
#include "mfk/quadrature.hpp"

namespace mfk {

double eval_potential(const PairPotential& phi, const Eigen::Ref<const Point>& z) {
  if (const auto* g = std::get_if<GaussianPotential>(&phi)) return std::exp(-z.squaredNorm() / (2.0 * g->gamma));
  if (const auto* q = std::get_if<InverseQuadraticPotential>(&phi)) return 1.0 / (1.0 + z.squaredNorm() / (q->c * q->c));
  return std::get<ConstantPotential>(phi).value;
}

namespace {

double potential_bound(const PairPotential& phi) {
  if (const auto* c = std::get_if<ConstantPotential>(&phi)) return std::abs(c->value);
  return 1.0;
}

double potential_lipschitz(const PairPotential& phi) {
  if (const auto* g = std::get_if<GaussianPotential>(&phi)) return std::exp(-0.5) / std::sqrt(g->gamma);
  // max_r 2 r c^2 / (c^2 + r^2)^2 at r = c / sqrt(3)
  if (const auto* q = std::get_if<InverseQuadraticPotential>(&phi)) return 3.0 * std::sqrt(3.0) / (8.0 * q->c);
  return 0.0;
}

}  // namespace

ObservableSpec::ObservableSpec(Kind kind) : kind_(std::move(kind)) {
  if (const auto* e = std::get_if<InteractionEnergyObservable>(&kind_)) {
    if (const auto* g = std::get_if<GaussianPotential>(&e->potential); g && !(g->gamma > 0.0))
      throw Error(ErrorCode::InvalidArgument, "gaussian potential needs gamma > 0");
    if (const auto* q = std::get_if<InverseQuadraticPotential>(&e->potential); q && !(q->c > 0.0))
      throw Error(ErrorCode::InvalidArgument, "inverse quadratic potential needs c > 0");
  }
}

double ObservableSpec::bound(const DomainBox& box) const {
  if (std::holds_alternative<CoordinateMeanObservable>(kind_))
    return std::max(std::abs(box.lower()[0]), std::abs(box.upper()[0]));
  if (std::holds_alternative<VarianceObservable>(kind_))
    return 0.25 * (box.upper() - box.lower()).squaredNorm();
  return potential_bound(std::get<InteractionEnergyObservable>(kind_).potential);
}

double ObservableSpec::lipschitz(const DomainBox& box) const {
  if (std::holds_alternative<CoordinateMeanObservable>(kind_)) return 1.0;
  // Variance is shift invariant; centre the box, then |x|^2 and |E x|^2 each
  // move by at most 2 (diameter / 2) W1.
  if (std::holds_alternative<VarianceObservable>(kind_)) return 2.0 * box.diameter();
  return 2.0 * potential_lipschitz(std::get<InteractionEnergyObservable>(kind_).potential);
}

namespace {

// Mean of x - origin under mu, coordinatewise pairwise sums.
RealVector integrate_vector(const DiscreteMeasure& mu, const RealVector& origin) {
  RealVector out(mu.dim());
  for (Eigen::Index c = 0; c < mu.dim(); ++c)
    out[c] = integrate(mu, [&](const auto& x) { return x[c] - origin[c]; });
  return out;
}

}  // namespace

double eval_observable(const ObservableSpec& spec, const ParticleConfiguration& config) {
  const auto m = config.size();
  const double inv_m = 1.0 / static_cast<double>(m);
  if (std::holds_alternative<CoordinateMeanObservable>(spec.kind())) {
    std::vector<double> xs(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) xs[i] = config.points()(0, i);
    return inv_m * pairwise_sum(xs);
  }
  if (std::holds_alternative<VarianceObservable>(spec.kind())) {
    // shifted by the first particle so that coincident particles give exactly 0
    const RealVector origin = config.point(0);
    RealVector mean(config.dim());
    std::vector<double> xs(static_cast<std::size_t>(m));
    for (Eigen::Index c = 0; c < config.dim(); ++c) {
      for (Eigen::Index i = 0; i < m; ++i) xs[i] = config.points()(c, i) - origin[c];
      mean[c] = inv_m * pairwise_sum(xs);
    }
    for (Eigen::Index i = 0; i < m; ++i) xs[i] = (config.point(i) - origin - mean).squaredNorm();
    return inv_m * pairwise_sum(xs);
  }
  const auto& phi = std::get<InteractionEnergyObservable>(spec.kind()).potential;
  std::vector<double> rows(static_cast<std::size_t>(m)), row(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) row[j] = eval_potential(phi, config.point(i) - config.point(j));
    rows[i] = pairwise_sum(row);
  }
  return inv_m * inv_m * pairwise_sum(rows);
}

double observable_limit(const ObservableSpec& spec, const DiscreteMeasure& mu) {
  if (std::holds_alternative<CoordinateMeanObservable>(spec.kind())) return measure_mean(mu)[0];
  if (std::holds_alternative<VarianceObservable>(spec.kind())) {
    const RealVector origin = mu.atom(0);
    const RealVector mean = integrate_vector(mu, origin);
    return integrate(mu, [&](const auto& x) { return (x - origin - mean).squaredNorm(); });
  }
  const auto& phi = std::get<InteractionEnergyObservable>(spec.kind()).potential;
  std::vector<double> rows(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    rows[i] = mu.weight(i) * integrate(mu, [&](const auto& y) { return eval_potential(phi, mu.atom(i) - y); });
  return pairwise_sum(rows);
}

double observable_population_limit(const ObservableSpec& spec, const SamplerSpec& mu) {
  const auto comps = quad::population(mu);
  const auto d = mu.dim();
  if (std::holds_alternative<CoordinateMeanObservable>(spec.kind())) {
    double s = 0.0;
    for (const auto& p : comps) s += p.weight * quad::expect(p.marginals[0], [](double x) { return x; });
    return s;
  }
  if (std::holds_alternative<VarianceObservable>(spec.kind())) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      double m1 = 0.0, m2 = 0.0;
      for (const auto& p : comps) {
        m1 += p.weight * quad::expect(p.marginals[c], [](double x) { return x; });
        m2 += p.weight * quad::expect(p.marginals[c], [](double x) { return x * x; });
      }
      total += m2 - m1 * m1;
    }
    return total;
  }
  const auto& phi = std::get<InteractionEnergyObservable>(spec.kind()).potential;
  if (const auto* c = std::get_if<ConstantPotential>(&phi)) return c->value;
  const auto* g = std::get_if<GaussianPotential>(&phi);
  if (g == nullptr && d != 1)
    throw Error(ErrorCode::UnknownLimit, "population energy needs a gaussian potential or d = 1");
  double total = 0.0;
  for (const auto& p : comps) {
    for (const auto& q : comps) {
      double prod = 1.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        prod *= quad::expect2(p.marginals[c], q.marginals[c], [&](double x, double y) {
          Point z(1);
          z[0] = x - y;
          return eval_potential(phi, z);
        });
      }
      total += p.weight * q.weight * prod;
    }
  }
  return total;
}

DynamicsSpec::DynamicsSpec(std::variant<AttractionRepulsionDynamics, PureDiffusionDynamics> k, SamplerSpec init)
    : kind(std::move(k)), initial(std::move(init)) {
  const double dt = std::visit([](const auto& v) { return v.dt; }, kind);
  const double noise = std::visit([](const auto& v) { return v.noise; }, kind);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dynamics needs dt > 0");
  if (!(noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "dynamics needs noise >= 0");
  if (const auto* a = std::get_if<AttractionRepulsionDynamics>(&kind); a && !(a->length > 0.0))
    throw Error(ErrorCode::InvalidArgument, "repulsion length must be positive");
}

namespace {

double reflect(double x, double lo, double hi) {
  if (x >= lo && x <= hi) return x;
  const double width = hi - lo;
  double t = std::fmod(x - lo, 2.0 * width);
  if (t < 0.0) t += 2.0 * width;
  if (t > width) t = 2.0 * width - t;
  return std::clamp(lo + t, lo, hi);
}

}  // namespace

std::vector<ParticleConfiguration> simulate(const DynamicsSpec& dyn, Eigen::Index m, int steps, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "simulate needs M >= 1");
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "simulate needs steps >= 0");
  Rng rng = make_rng({seed, 0x73696dU});
  std::vector<ParticleConfiguration> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(sample_configuration(dyn.initial, m, rng));
  const auto& box = dyn.initial.domain();
  const double dt = std::visit([](const auto& v) { return v.dt; }, dyn.kind);
  const double noise = std::visit([](const auto& v) { return v.noise; }, dyn.kind);
  const auto* ar = std::get_if<AttractionRepulsionDynamics>(&dyn.kind);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqrt_dt = std::sqrt(dt);

  Eigen::MatrixXd x = out.back().points();
  Eigen::MatrixXd drift(x.rows(), x.cols());
  for (int s = 0; s < steps; ++s) {
    drift.setZero();
    if (ar != nullptr) {
      const double inv_len2 = 1.0 / (2.0 * ar->length * ar->length);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          if (i == j) continue;
          const RealVector z = x.col(j) - x.col(i);
          drift.col(i) += ar->attraction * z - ar->repulsion * z * std::exp(-z.squaredNorm() * inv_len2);
        }
      }
      drift /= static_cast<double>(m);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index c = 0; c < x.rows(); ++c) {
        const double step = dt * drift(c, i) + (noise > 0.0 ? noise * sqrt_dt * normal(rng) : 0.0);
        x(c, i) = reflect(x(c, i) + step, box.lower()[c], box.upper()[c]);
      }
    }
    out.emplace_back(x);
  }
  return out;
}

Dataset make_dataset(const std::vector<ParticleConfiguration>& configs, const ObservableSpec& observable) {
  if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "make_dataset needs configurations");
  Dataset ds;
  ds.m = configs.front().size();
  ds.dim = configs.front().dim();
  for (const auto& c : configs) {
    if (c.size() != ds.m || c.dim() != ds.dim)
      throw Error(ErrorCode::HeterogeneousConfigs, "configurations differ in particle count or dimension");
    ds.records.push_back({c, eval_observable(observable, c)});
  }
  return ds;
}

}  // namespace mfk
