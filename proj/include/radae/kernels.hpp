#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace radae {

/// Dense row-major matrix of doubles. Rows are hidden units, columns are inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void fill(double v);

  // Structural edits used by network growth and merging. Existing entries keep their values.
  void append_rows(std::size_t count, double fill = 0.0);
  void append_cols(std::size_t count, double fill = 0.0);
  void erase_row(std::size_t r);
  void erase_col(std::size_t c);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace kernels {

// Each kernel has a serial reference and an OpenMP version. Both accumulate every
// output element in the same order, so the results are bit-identical.

namespace serial {
/// out = W x + b
void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
            std::span<double> out);
/// out = W^T z + c
void affine_t(const Matrix& w, std::span<const double> z, std::span<const double> c,
              std::span<double> out);
/// W += alpha * u v^T
void add_outer(Matrix& w, double alpha, std::span<const double> u, std::span<const double> v);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace serial

namespace parallel {
void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
            std::span<double> out);
void affine_t(const Matrix& w, std::span<const double> z, std::span<const double> c,
              std::span<double> out);
void add_outer(Matrix& w, double alpha, std::span<const double> u, std::span<const double> v);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace parallel

/// Threads used by the dispatching kernels on the calling thread. 1 selects the
/// serial reference. The setting is thread-local so concurrent experiments do not
/// interfere with each other.
void set_threads(int n);
int threads();

/// Work (rows * cols) below which the dispatching kernels stay serial even when
/// more threads are configured.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
            std::span<double> out);
void affine_t(const Matrix& w, std::span<const double> z, std::span<const double> c,
              std::span<double> out);
void add_outer(Matrix& w, double alpha, std::span<const double> u, std::span<const double> v);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Scoped override of the kernel thread count.
class ScopedThreads {
 public:
  explicit ScopedThreads(int n) : saved_(threads()) { set_threads(n); }
  ~ScopedThreads() { set_threads(saved_); }
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
  int saved_;
};

}  // namespace kernels
}  // namespace radae
