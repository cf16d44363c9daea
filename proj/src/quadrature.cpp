#include "mfk/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "mfk/errors.hpp"

namespace mfk::quad {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

namespace {

double refine(const std::function<double(int)>& at) {
  double prev = at(kStartNodes);
  for (int n = 2 * kStartNodes; n <= kMaxNodes; n *= 2) {
    const double cur = at(n);
    if (std::abs(cur - prev) <= kAgreement * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw Error(ErrorCode::QuadratureNotConverged, "quadrature did not reach 1e-10 agreement at 1024 nodes");
}

// Nodes and probability weights of a marginal under an n-point rule.
void discretize(const Marginal& m, const GaussLegendreRule& rule, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  if (const auto* a = std::get_if<AtomMarginal>(&m)) {
    x.push_back(a->at);
    w.push_back(1.0);
    return;
  }
  double lo, hi;
  if (const auto* u = std::get_if<UniformMarginal>(&m)) {
    lo = u->lo;
    hi = u->hi;
  } else {
    const auto& t = std::get<TruncatedNormalMarginal>(m);
    lo = t.lo;
    hi = t.hi;
  }
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    x.push_back(mid + half * rule.nodes[i]);
    w.push_back(half * rule.weights[i]);
  }
  if (std::holds_alternative<UniformMarginal>(m)) {
    for (auto& wi : w) wi /= (hi - lo);
    return;
  }
  const auto& t = std::get<TruncatedNormalMarginal>(m);
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  const double z = t.sd * std::sqrt(2.0 * std::numbers::pi) * (cdf((hi - t.mean) / t.sd) - cdf((lo - t.mean) / t.sd));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - t.mean) / t.sd;
    w[i] *= std::exp(-0.5 * u * u) / z;
  }
}

bool is_atom(const Marginal& m) { return std::holds_alternative<AtomMarginal>(m); }

}  // namespace

std::vector<ProductComponent> population(const SamplerSpec& sampler) {
  auto box_marginals = [](const DomainBox& b) {
    std::vector<Marginal> out;
    for (Eigen::Index c = 0; c < b.dim(); ++c) out.emplace_back(UniformMarginal{b.lower()[c], b.upper()[c]});
    return out;
  };
  return std::visit(
      [&](const auto& s) -> std::vector<ProductComponent> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformBoxSampler>) {
          return {{1.0, box_marginals(s.support)}};
        } else if constexpr (std::is_same_v<T, TruncatedNormalSampler>) {
          std::vector<Marginal> ms;
          for (Eigen::Index c = 0; c < s.mean.size(); ++c)
            ms.emplace_back(TruncatedNormalMarginal{s.mean[c], s.stddev[c], s.support.lower()[c], s.support.upper()[c]});
          return {{1.0, std::move(ms)}};
        } else if constexpr (std::is_same_v<T, BoxMixtureSampler>) {
          std::vector<ProductComponent> out;
          for (std::size_t k = 0; k < s.components.size(); ++k)
            out.push_back({s.weights[k], box_marginals(s.components[k])});
          return out;
        } else {
          std::vector<Marginal> ms;
          for (Eigen::Index c = 0; c < s.location.size(); ++c) ms.emplace_back(AtomMarginal{s.location[c]});
          return {{1.0, std::move(ms)}};
        }
      },
      sampler.kind());
}

double expect(const Marginal& a, const std::function<double(double)>& f) {
  auto at = [&](int n) {
    std::vector<double> x, w;
    discretize(a, gauss_legendre(n), x, w);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
  };
  if (is_atom(a)) return at(1);
  return refine(at);
}

double expect2(const Marginal& a, const Marginal& b, const std::function<double(double, double)>& g) {
  auto at = [&](int n) {
    std::vector<double> xa, wa, xb, wb;
    const auto rule = gauss_legendre(n);
    discretize(a, rule, xa, wa);
    discretize(b, rule, xb, wb);
    double s = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < xb.size(); ++j) row += wb[j] * g(xa[i], xb[j]);
      s += wa[i] * row;
    }
    return s;
  };
  if (is_atom(a) && is_atom(b)) return at(1);
  return refine(at);
}

double double_sum_limit(const BaseKernelSpec& base, const SamplerSpec& mu, const SamplerSpec& nu) {
  const auto* g = std::get_if<GaussianKernel>(&base.kind());
  if (g == nullptr)
    throw Error(ErrorCode::UnknownLimit, "double-sum limit oracle is available for gaussian base kernels only");
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "samplers differ in dimension");
  const double gamma = g->gamma;
  double total = 0.0;
  for (const auto& p : population(mu)) {
    for (const auto& q : population(nu)) {
      double prod = 1.0;
      for (std::size_t c = 0; c < p.marginals.size(); ++c)
        prod *= expect2(p.marginals[c], q.marginals[c],
                        [gamma](double x, double y) { return std::exp(-(x - y) * (x - y) / (2.0 * gamma)); });
      total += p.weight * q.weight * prod;
    }
  }
  return total;
}

RealVector feature_limit(const FeatureMapSpec& fmap, const SamplerSpec& mu) {
  const auto comps = population(mu);
  const auto d = mu.dim();
  RealVector out = RealVector::Zero(fmap.output_dim(d));
  for (const auto& p : comps) {
    if (std::holds_alternative<MeanFeature>(fmap.kind())) {
      for (Eigen::Index c = 0; c < d; ++c) out[c] += p.weight * expect(p.marginals[c], [](double x) { return x; });
    } else if (const auto* m = std::get_if<MomentsFeature>(&fmap.kind())) {
      for (Eigen::Index c = 0; c < d; ++c)
        for (int j = 1; j <= m->order; ++j)
          out[c * m->order + (j - 1)] += p.weight * expect(p.marginals[c], [j](double x) { return std::pow(x, j); });
    } else {
      const auto& h = std::get<SoftHistogramFeature>(fmap.kind());
      if (h.grid.rows() != d) throw Error(ErrorCode::DimensionMismatch, "soft histogram grid dimension differs");
      const double denom = 2.0 * h.bandwidth * h.bandwidth;
      for (Eigen::Index gi = 0; gi < h.grid.cols(); ++gi) {
        double prod = 1.0;
        for (Eigen::Index c = 0; c < d; ++c) {
          const double center = h.grid(c, gi);
          prod *= expect(p.marginals[c], [&](double x) { return std::exp(-(x - center) * (x - center) / denom); });
        }
        out[gi] += p.weight * prod;
      }
    }
  }
  return out;
}

}  // namespace mfk::quad
