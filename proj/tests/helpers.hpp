#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "mfk/measures.hpp"
#include "mfk/sampler.hpp"

namespace mfk::testing {

inline DiscreteMeasure random_measure(Rng& rng, Eigen::Index n, Eigen::Index d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi), w(0.05, 1.0);
  Eigen::MatrixXd atoms(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) atoms(i, j) = u(rng);
  RealVector weights(n);
  for (Eigen::Index j = 0; j < n; ++j) weights[j] = w(rng);
  weights /= weights.sum();
  return DiscreteMeasure(atoms, weights);
}

inline ParticleConfiguration random_config(Rng& rng, Eigen::Index m, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pts(d, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < d; ++i) pts(i, j) = u(rng);
  return ParticleConfiguration(pts);
}

inline std::vector<Eigen::Index> random_permutation(Rng& rng, Eigen::Index m) {
  std::vector<Eigen::Index> p(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = i;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline DiscreteMeasure measure_1d(std::vector<double> atoms, std::vector<double> weights) {
  Eigen::MatrixXd a(1, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) a(0, static_cast<Eigen::Index>(i)) = atoms[i];
  return DiscreteMeasure(a, Eigen::Map<RealVector>(weights.data(), static_cast<Eigen::Index>(weights.size())));
}

inline Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

// Expects `expr` to throw mfk::Error with the given code.
#define MFK_CHECK_ERROR(expr, errcode)                       \
  do {                                                       \
    bool mfk_thrown_ = false;                                \
    try {                                                    \
      (void)(expr);                                          \
    } catch (const ::mfk::Error& mfk_e_) {                   \
      mfk_thrown_ = true;                                    \
      CHECK_MESSAGE(mfk_e_.code() == (errcode), mfk_e_.what()); \
    }                                                        \
    CHECK_MESSAGE(mfk_thrown_, "expected an mfk::Error");    \
  } while (0)

}  // namespace mfk::testing
