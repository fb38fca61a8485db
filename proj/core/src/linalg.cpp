#include "kinlyap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kinlyap/error.hpp"

namespace kinlyap {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorCode::DimensionMismatch, "block out of range");
  }
  Matrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error(ErrorCode::DimensionMismatch, "matrix sum");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error(ErrorCode::DimensionMismatch, "matrix difference");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix product");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

namespace {

double off_diagonal_mass(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& symmetric, double rel_tol) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "eigen decomposition needs a square matrix");
  }
  Matrix a = symmetric;
  // Symmetrize exactly so rotations act on a truly symmetric matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  Matrix v = Matrix::identity(n);
  const double target = rel_tol * a.frobenius();

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_diagonal_mass(a) > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
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

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  const Matrix gram = a.transpose() * a;
  const auto eig = jacobi_eigen(gram);
  return std::sqrt(std::max(0.0, eig.values.front()));
}

double min_singular_value(const Matrix& a) {
  if (a.empty()) return 0.0;
  const Matrix gram = a.transpose() * a;
  const auto eig = jacobi_eigen(gram);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

LuFactorization::LuFactorization(const Matrix& a) : n_(a.rows()) {
  if (a.cols() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "LU needs a square matrix");
  }
  lu_.assign(a.data().begin(), a.data().end());
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = std::max(a.max_abs(), 1e-300);

  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu_[k * n_ + k]);
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double v = std::abs(lu_[i * n_ + k]);
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best <= 1e-14 * scale) {
      throw Error(ErrorCode::SingularMatrix, "zero pivot in column " + std::to_string(k));
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_[k * n_ + j], lu_[pivot * n_ + j]);
      std::swap(perm_[k], perm_[pivot]);
    }
    const double inv = 1.0 / lu_[k * n_ + k];
    for (std::size_t i = k + 1; i < n_; ++i) {
      double& lik = lu_[i * n_ + k];
      lik *= inv;
      for (std::size_t j = k + 1; j < n_; ++j) lu_[i * n_ + j] -= lik * lu_[k * n_ + j];
    }
  }
}

void LuFactorization::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "LU solve right-hand side");
  }
  // Small fixed buffer covers every realistic velocity set; fall back to heap.
  double stack_buf[64];
  std::vector<double> heap_buf;
  double* y = stack_buf;
  if (n_ > 64) {
    heap_buf.resize(n_);
    y = heap_buf.data();
  }
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_[i * n_ + j] * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n_; ++j) s -= lu_[ii * n_ + j] * y[j];
    y[ii] = s / lu_[ii * n_ + ii];
  }
  std::copy(y, y + n_, b.begin());
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Matrix LuFactorization::lower() const {
  Matrix l = Matrix::identity(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) l(i, j) = lu_[i * n_ + j];
  return l;
}

Matrix LuFactorization::upper() const {
  Matrix u(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) u(i, j) = lu_[i * n_ + j];
  return u;
}

}  // namespace kinlyap
