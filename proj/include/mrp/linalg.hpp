#pragma once

// Dense real linear algebra used by the solvers. Sizes in this project are
// small (a few dozen rows at most, a few hundred for the vectorized MM
// matrices), so everything is plain row-major storage with O(n^3) kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrp/errors.hpp"

namespace mrp {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Matrix column(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  Vector col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(std::size_t j, std::span<const double> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(Matrix a, double s) { return a *= s; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product shapes differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector shapes differ");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

/// Aᵀx without forming the transpose.
inline Vector transpose_times(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw Error(ErrorCode::DimensionMismatch, "transpose-vector shapes differ");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

// --- vector helpers --------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "dot product sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

inline double sum(std::span<const double> a) { return std::accumulate(a.begin(), a.end(), 0.0); }

inline Vector operator+(Vector a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vector operator-(Vector a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vector operator*(double s, Vector a) {
  for (auto& v : a) v *= s;
  return a;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline Matrix outer(std::span<const double> a, std::span<const double> b) {
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

inline double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// --- symmetric matrices ----------------------------------------------------

/// Square symmetric matrix. Construction symmetrizes as (A + Aᵀ)/2, so the
/// stored entries satisfy a(i,j) == a(j,i) bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Matrix a) : a_(std::move(a)) {
    if (!a_.square()) throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
    if (!all_finite(a_.data())) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
    const std::size_t n = a_.rows();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = 0.5 * (a_(i, j) + a_(j, i));
        a_(i, j) = v;
        a_(j, i) = v;
      }
  }

  SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymMatrix(Matrix(rows)) {}

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }
  static SymMatrix zeros(std::size_t n) { return SymMatrix(Matrix(n, n)); }
  static SymMatrix diagonal(std::span<const double> d) { return SymMatrix(Matrix::diagonal(d)); }

  std::size_t dim() const noexcept { return a_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_(i, j); }
  const Matrix& matrix() const noexcept { return a_; }

  /// xᵀAx
  double quad(std::span<const double> x) const { return dot(x, a_ * x); }

  /// xᵀAy
  double bilinear(std::span<const double> x, std::span<const double> y) const { return dot(x, a_ * y); }

  Vector operator*(std::span<const double> x) const { return a_ * x; }

  SymMatrix& operator+=(const SymMatrix& o) {
    a_ += o.a_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    a_ *= s;
    return *this;
  }

 private:
  Matrix a_;
};

inline SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
inline SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

/// FᵀAF
inline SymMatrix congruence(const Matrix& f, const SymMatrix& a) {
  return SymMatrix(f.transpose() * (a.matrix() * f));
}

// --- Cholesky ----------------------------------------------------------------

/// Lower-triangular L with strictly positive diagonal and A = LLᵀ.
struct CholeskyFactor {
  Matrix lower;

  std::size_t dim() const noexcept { return lower.rows(); }

  /// Solves L y = b.
  Vector solve_lower(std::span<const double> b) const {
    const std::size_t n = dim();
    Vector y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[i];
      for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
      y[i] = s / lower(i, i);
    }
    return y;
  }

  /// Solves Lᵀ x = y.
  Vector solve_upper(std::span<const double> y) const {
    const std::size_t n = dim();
    Vector x(y.begin(), y.end());
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
      x[ii] = s / lower(ii, ii);
    }
    return x;
  }

  /// Solves A x = b.
  Vector solve(std::span<const double> b) const { return solve_upper(solve_lower(b)); }

  /// L⁻¹ A L⁻ᵀ for a symmetric A of matching size.
  SymMatrix whiten(const SymMatrix& a) const {
    const std::size_t n = dim();
    if (a.dim() != n) throw Error(ErrorCode::DimensionMismatch, "whiten: size mismatch");
    // Y = L⁻¹ A column by column, then (L⁻¹ Yᵀ)ᵀ = L⁻¹ A L⁻ᵀ since A is symmetric.
    Matrix y(n, n);
    for (std::size_t j = 0; j < n; ++j) y.set_col(j, solve_lower(a.matrix().col(j)));
    Matrix yt = y.transpose();
    Matrix z(n, n);
    for (std::size_t j = 0; j < n; ++j) z.set_col(j, solve_lower(yt.col(j)));
    return SymMatrix(std::move(z));
  }

  Matrix reconstruct() const { return lower * lower.transpose(); }
};

/// Relative pivot threshold: a pivot at or below 1e-12 * max diagonal entry is
/// reported as NotPositiveDefinite rather than producing a garbage factor.
inline constexpr double kCholeskyRelativePivot = 1e-12;

inline CholeskyFactor cholesky(const SymMatrix& a) {
  const std::size_t n = a.dim();
  if (n == 0) throw Error(ErrorCode::DimensionTooSmall, "cholesky of empty matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double threshold = kCholeskyRelativePivot * max_diag;

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > threshold) || max_diag == 0.0)
      throw Error(ErrorCode::NotPositiveDefinite,
                  "pivot " + std::to_string(j) + " = " + std::to_string(d) + " is not positive");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return CholeskyFactor{std::move(l)};
}

// --- null space of the all-ones row -------------------------------------------

/// Orthonormal basis F (n x (n-1)) of {x : 1ᵀx = 0}.
struct NullspaceBasis {
  Matrix cols;

  std::size_t ambient_dim() const noexcept { return cols.rows(); }
  std::size_t dim() const noexcept { return cols.cols(); }

  /// F x
  Vector lift(std::span<const double> x) const { return cols * x; }
  /// Fᵀ w
  Vector project(std::span<const double> w) const { return transpose_times(cols, w); }
};

/// Helmert construction: column k (1-based) has k leading entries 1/sqrt(k(k+1)),
/// then -k/sqrt(k(k+1)) in row k, zeros below. Deterministic for each n.
inline NullspaceBasis nullspace_basis(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::DimensionTooSmall, "null-space basis needs n >= 2");
  Matrix f(n, n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = std::sqrt(kk * (kk + 1.0));
    for (std::size_t i = 0; i < k; ++i) f(i, k - 1) = 1.0 / s;
    f(k, k - 1) = -kk / s;
  }
  return NullspaceBasis{std::move(f)};
}

// --- symmetric eigenproblem ---------------------------------------------------

struct EigenDecomposition {
  Vector values;   ///< ascending
  Matrix vectors;  ///< orthonormal, column j pairs with values[j]
};

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiRelativeOffDiag = 1e-12;

/// Cyclic Jacobi. Converged once the off-diagonal Frobenius norm drops to
/// 1e-12 * ||A||_F; throws NoConvergence after the sweep budget.
inline EigenDecomposition sym_eigen(const SymMatrix& a_in, int max_sweeps = kJacobiMaxSweeps) {
  const std::size_t n = a_in.dim();
  Matrix a = a_in.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = frobenius_norm(a);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    if (off_norm() <= kJacobiRelativeOffDiag * scale) {
      converged = true;
      break;
    }
    if (sweep == max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi sweep budget exhausted");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

/// Generalized eigenpairs of the pencil (N, N0), N0 SPD, via N0 = RRᵀ and the
/// standard problem R⁻¹NR⁻ᵀ. Eigenvectors are N0-orthonormal.
inline EigenDecomposition gen_eigen(const SymMatrix& n_mat, const SymMatrix& n0) {
  if (n_mat.dim() != n0.dim()) throw Error(ErrorCode::DimensionMismatch, "pencil sizes differ");
  const CholeskyFactor r = cholesky(n0);
  EigenDecomposition e = sym_eigen(r.whiten(n_mat));
  for (std::size_t j = 0; j < e.vectors.cols(); ++j) e.vectors.set_col(j, r.solve_upper(e.vectors.col(j)));
  return e;
}

/// Smallest λ with det(N − λN0) = 0.
inline double min_gen_eig(const SymMatrix& n_mat, const SymMatrix& n0) {
  if (n_mat.dim() != n0.dim()) throw Error(ErrorCode::DimensionMismatch, "pencil sizes differ");
  return sym_eigen(cholesky(n0).whiten(n_mat)).values.front();
}

// --- spectral norm bounds -----------------------------------------------------

enum class NormRule { exact, frobenius, row_inf, col_one, max_entry, inf_one_geomean };

inline constexpr std::string_view to_string(NormRule r) noexcept {
  switch (r) {
    case NormRule::exact: return "exact";
    case NormRule::frobenius: return "frobenius";
    case NormRule::row_inf: return "row_inf";
    case NormRule::col_one: return "col_one";
    case NormRule::max_entry: return "max_entry";
    case NormRule::inf_one_geomean: return "inf_one_geomean";
  }
  return "exact";
}

inline NormRule parse_norm_rule(std::string_view s) {
  for (NormRule r : {NormRule::exact, NormRule::frobenius, NormRule::row_inf, NormRule::col_one, NormRule::max_entry,
                     NormRule::inf_one_geomean})
    if (to_string(r) == s) return r;
  throw Error(ErrorCode::InvalidArgument, "unknown spectral-norm rule '" + std::string(s) + "'");
}

/// An upper bound on ||B||_2. `exact` is max |eigenvalue|; the others are the
/// classical entrywise/induced-norm bounds for a P x Q matrix (here P = Q).
inline double spectral_norm_bound(const SymMatrix& b, NormRule rule) {
  const std::size_t n = b.dim();
  const auto& m = b.matrix();
  auto max_row_sum = [&] {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, norm1(m.row(i)));
    return best;
  };
  auto max_col_sum = [&] {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(m(i, j));
      best = std::max(best, s);
    }
    return best;
  };
  const double dn = static_cast<double>(n);
  switch (rule) {
    case NormRule::exact: {
      if (n == 0) return 0.0;
      const auto vals = sym_eigen(b).values;
      return std::max(std::abs(vals.front()), std::abs(vals.back()));
    }
    case NormRule::frobenius: return frobenius_norm(m);
    case NormRule::row_inf: return std::sqrt(dn) * max_row_sum();
    case NormRule::col_one: return std::sqrt(dn) * max_col_sum();
    case NormRule::max_entry: {
      double mx = 0.0;
      for (double v : m.data()) mx = std::max(mx, std::abs(v));
      return dn * mx;
    }
    case NormRule::inf_one_geomean: return std::sqrt(max_row_sum() * max_col_sum());
  }
  return 0.0;
}

// --- least squares --------------------------------------------------------------

/// min ||X beta - y||_2 by Householder QR. Throws RankDeficientRegression when a
/// column is (numerically) a combination of the previous ones.
inline Vector least_squares(const Matrix& x_in, std::span<const double> y_in) {
  const std::size_t m = x_in.rows();
  const std::size_t k = x_in.cols();
  if (y_in.size() != m) throw Error(ErrorCode::DimensionMismatch, "least squares: rows differ");
  if (m < k) throw Error(ErrorCode::RankDeficientRegression, "fewer observations than regressors");
  Matrix a = x_in;
  Vector y(y_in.begin(), y_in.end());
  double max_col = 0.0;
  for (std::size_t j = 0; j < k; ++j) max_col = std::max(max_col, norm2(a.col(j)));

  Vector rdiag(k);
  for (std::size_t j = 0; j < k; ++j) {
    double alpha = 0.0;
    for (std::size_t i = j; i < m; ++i) alpha += a(i, j) * a(i, j);
    alpha = std::sqrt(alpha);
    if (alpha <= 1e-12 * max_col || max_col == 0.0)
      throw Error(ErrorCode::RankDeficientRegression, "regressor column " + std::to_string(j) + " is degenerate");
    if (a(j, j) > 0) alpha = -alpha;
    // v = x - alpha e1, stored in place
    a(j, j) -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) vnorm2 += a(i, j) * a(i, j);
    for (std::size_t c = j + 1; c < k; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += a(i, j) * a(i, c);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = j; i < m; ++i) a(i, c) -= s * a(i, j);
    }
    double s = 0.0;
    for (std::size_t i = j; i < m; ++i) s += a(i, j) * y[i];
    s = 2.0 * s / vnorm2;
    for (std::size_t i = j; i < m; ++i) y[i] -= s * a(i, j);
    rdiag[j] = alpha;
  }
  double rmax = 0.0;
  for (double r : rdiag) rmax = std::max(rmax, std::abs(r));
  for (std::size_t j = 0; j < k; ++j)
    if (std::abs(rdiag[j]) <= 1e-10 * rmax)
      throw Error(ErrorCode::RankDeficientRegression, "design matrix is rank deficient");
  Vector beta(k);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t c = jj + 1; c < k; ++c) s -= a(jj, c) * beta[c];
    beta[jj] = s / rdiag[jj];
  }
  return beta;
}

}  // namespace mrp
