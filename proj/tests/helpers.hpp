#pragma once

#include <random>

#include <Eigen/Dense>

#include "mrp/mrp.hpp"

namespace testutil {

inline mrp::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  mrp::Matrix a(r, c);
  for (auto& v : a.data()) v = nd(g);
  return a;
}

inline mrp::Vector random_vector(std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  mrp::Vector v(n);
  for (auto& x : v) x = nd(g);
  return v;
}

inline mrp::SymMatrix random_sym(std::size_t n, std::mt19937_64& g) { return mrp::SymMatrix(random_matrix(n, n, g)); }

/// A A' + shift I
inline mrp::SymMatrix random_spd(std::size_t n, std::mt19937_64& g, double shift = 0.1) {
  const mrp::Matrix a = random_matrix(n, n, g);
  return mrp::SymMatrix(a * a.transpose() + shift * mrp::Matrix::identity(n));
}

inline Eigen::MatrixXd to_eigen(const mrp::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::MatrixXd to_eigen(const mrp::SymMatrix& m) { return to_eigen(m.matrix()); }

/// Smallest generalized eigenvalue from Eigen's dense solver.
inline double eigen_min_gen(const mrp::SymMatrix& n, const mrp::SymMatrix& n0) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(n), to_eigen(n0));
  return es.eigenvalues()(0);
}

/// Autocovariances of a simulated stable VAR(1) with standard normal shocks.
inline mrp::AutocovSet var_acv(std::size_t n, std::size_t p, std::mt19937_64& g, std::size_t t_len = 500) {
  std::normal_distribution<double> nd;
  mrp::Matrix a = random_matrix(n, n, g);
  a *= 0.3;
  const auto e = mrp::sym_eigen(mrp::SymMatrix(a.transpose() * a));
  const double s = std::sqrt(e.values.back());
  if (s > 0.9) a *= 0.9 / s;
  mrp::Matrix x(t_len, n);
  mrp::Vector state(n, 0.0);
  for (std::size_t t = 0; t < t_len; ++t) {
    mrp::Vector next = a * state;
    for (auto& v : next) v += nd(g);
    state = next;
    for (std::size_t j = 0; j < n; ++j) x(t, j) = state[j];
  }
  return mrp::autocov_set(mrp::center(x), p);
}

/// Gaussian AR(1) started from its stationary law.
inline mrp::Vector ar1(double phi, std::size_t t_len, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  mrp::Vector z(t_len);
  double x = nd(g) / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 0; t < t_len; ++t) {
    z[t] = x;
    x = phi * x + nd(g);
  }
  return z;
}

}  // namespace testutil
