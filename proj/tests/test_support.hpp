#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <sglab/core.hpp>

namespace sglab::testing {

inline Eigen::MatrixXd to_eigen(const Operator& a) {
  Eigen::MatrixXd m(a.dim(), a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a(i, j);
  return m;
}

inline Element from_eigen(const Eigen::VectorXd& v) {
  return Element(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd to_eigen(const Element& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.values().data(), static_cast<Eigen::Index>(x.dim()));
}

/// Scaling-and-squaring Pade reference for exp(tA)x.
inline Element expm_oracle(const Operator& a, double t, const Element& x) {
  const Eigen::MatrixXd e = (t * to_eigen(a)).exp();
  return from_eigen(e * to_eigen(x));
}

/// Conservative rate matrix with off-diagonal rates uniform on [0, scale).
inline Operator random_q(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  Operator q(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      q(i, j) = u(rng);
      s += q(i, j);
    }
    q(i, i) = -s;
  }
  return q;
}

/// Strictly sup-norm dissipative: g_ii + sum_{j != i} |g_ij| <= -margin < 0.
inline Operator random_dissipative(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale), m(0.05, 1.0);
  Operator g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      g(i, j) = u(rng);
      s += std::abs(g(i, j));
    }
    g(i, i) = -s - m(rng);
  }
  return g;
}

/// Arbitrary matrix with entries uniform on [-scale, scale].
inline Operator random_operator(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Operator g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = u(rng);
  return g;
}

inline Element random_element(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return Element(std::move(v));
}

inline std::vector<Element> random_elements(std::size_t count, std::size_t n, std::mt19937_64& rng) {
  std::vector<Element> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_element(n, rng));
  return out;
}

inline double max_abs_diff(const Element& a, const Element& b) { return sup_norm(a - b); }

}  // namespace sglab::testing
