#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kinlyap {

// Small dense row-major matrix. Every matrix in this library is K x K with
// K at most a few dozen, so no attempt is made at blocking or sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  // Rows [r0, r0 + nr) and columns [c0, c0 + nc).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  Matrix& operator*=(double s);
  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);

  double max_abs() const;
  double frobenius() const;
  bool is_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Max-norm of a - b; dimensions must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i belongs to values[i]
  int sweeps = 0;
};

// Cyclic Jacobi rotations. Iterates until the off-diagonal Frobenius mass is
// at most rel_tol * ||A||_F. Eigenvalues are sorted descending; ties keep the
// original diagonal position order.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double rel_tol = 1e-14);

// Largest singular value, computed as sqrt(lambda_max(A^T A)) through the
// Jacobi routine. Empty matrices have norm zero.
double spectral_norm(const Matrix& a);

// Smallest singular value (sqrt of lambda_min of the Gram matrix).
double min_singular_value(const Matrix& a);

// Row-pivoted LU decomposition P A = L U of a square matrix, stored packed.
class LuFactorization {
 public:
  explicit LuFactorization(const Matrix& a);

  std::size_t size() const noexcept { return n_; }

  // Solves A x = b in place.
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;

  Matrix lower() const;
  Matrix upper() const;
  // Permutation applied to the rows of A: row i of PA is row perm()[i] of A.
  std::span<const std::size_t> permutation() const noexcept { return perm_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace kinlyap
