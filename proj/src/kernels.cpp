#include "radae/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cassert>

namespace radae {

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Matrix::append_rows(std::size_t count, double fill) {
  data_.resize(data_.size() + count * cols_, fill);
  rows_ += count;
}

void Matrix::append_cols(std::size_t count, double fill) {
  const std::size_t new_cols = cols_ + count;
  std::vector<double> next(rows_ * new_cols, fill);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_), cols_,
                next.begin() + static_cast<std::ptrdiff_t>(r * new_cols));
  }
  data_ = std::move(next);
  cols_ = new_cols;
}

void Matrix::erase_row(std::size_t r) {
  assert(r < rows_);
  auto first = data_.begin() + static_cast<std::ptrdiff_t>(r * cols_);
  data_.erase(first, first + static_cast<std::ptrdiff_t>(cols_));
  --rows_;
}

void Matrix::erase_col(std::size_t c) {
  assert(c < cols_);
  const std::size_t new_cols = cols_ - 1;
  std::vector<double> next(rows_ * new_cols);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0, out = 0; k < cols_; ++k) {
      if (k != c) next[r * new_cols + out++] = data_[r * cols_ + k];
    }
  }
  data_ = std::move(next);
  cols_ = new_cols;
}

namespace kernels {

namespace {
thread_local int tl_threads = 1;

inline double dot_row(const double* row, const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
  return acc;
}
}  // namespace

void set_threads(int n) { tl_threads = std::max(1, n); }
int threads() { return tl_threads; }

namespace serial {

void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
            std::span<double> out) {
  assert(x.size() == w.cols() && b.size() == w.rows() && out.size() == w.rows());
  const std::size_t n = w.cols();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    out[i] = b[i] + dot_row(w.row(i).data(), x.data(), n);
  }
}

void affine_t(const Matrix& w, std::span<const double> z, std::span<const double> c,
              std::span<double> out) {
  assert(z.size() == w.rows() && c.size() == w.cols() && out.size() == w.cols());
  const std::size_t n = w.cols();
  std::copy(c.begin(), c.end(), out.begin());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double zi = z[i];
    const double* row = w.row(i).data();
    for (std::size_t j = 0; j < n; ++j) out[j] += row[j] * zi;
  }
}

void add_outer(Matrix& w, double alpha, std::span<const double> u, std::span<const double> v) {
  assert(u.size() == w.rows() && v.size() == w.cols());
  const std::size_t n = w.cols();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double s = alpha * u[i];
    double* row = w.row(i).data();
    for (std::size_t j = 0; j < n; ++j) row[j] += s * v[j];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t j = 0; j < x.size(); ++j) y[j] += alpha * x[j];
}

}  // namespace serial

namespace parallel {

void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
            std::span<double> out) {
  assert(x.size() == w.cols() && b.size() == w.rows() && out.size() == w.rows());
  const auto rows = static_cast<std::ptrdiff_t>(w.rows());
  const std::size_t n = w.cols();
#pragma omp parallel for schedule(static) num_threads(tl_threads)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    out[i] = b[i] + dot_row(w.row(i).data(), x.data(), n);
  }
}

void affine_t(const Matrix& w, std::span<const double> z, std::span<const double> c,
              std::span<double> out) {
  assert(z.size() == w.rows() && c.size() == w.cols() && out.size() == w.cols());
  // Columns are split across threads; each column still sums rows in ascending order.
  const auto cols = static_cast<std::ptrdiff_t>(w.cols());
  const std::size_t rows = w.rows();
  const int nt = tl_threads;
#pragma omp parallel num_threads(nt)
  {
    const std::ptrdiff_t t = omp_get_thread_num();
    const std::ptrdiff_t count = omp_get_num_threads();
    const std::ptrdiff_t lo = cols * t / count;
    const std::ptrdiff_t hi = cols * (t + 1) / count;
    for (std::ptrdiff_t j = lo; j < hi; ++j) out[j] = c[j];
    for (std::size_t i = 0; i < rows; ++i) {
      const double zi = z[i];
      const double* row = w.row(i).data();
      for (std::ptrdiff_t j = lo; j < hi; ++j) out[j] += row[j] * zi;
    }
  }
}

void add_outer(Matrix& w, double alpha, std::span<const double> u, std::span<const double> v) {
  assert(u.size() == w.rows() && v.size() == w.cols());
  const auto rows = static_cast<std::ptrdiff_t>(w.rows());
  const std::size_t n = w.cols();
#pragma omp parallel for schedule(static) num_threads(tl_threads)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double s = alpha * u[i];
    double* row = w.row(i).data();
    for (std::size_t j = 0; j < n; ++j) row[j] += s * v[j];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(tl_threads)
  for (std::ptrdiff_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

}  // namespace parallel

namespace {
inline bool use_parallel(std::size_t work) {
  return tl_threads > 1 && work >= kParallelThreshold;
}
}  // namespace

void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
            std::span<double> out) {
  if (use_parallel(w.size())) {
    parallel::affine(w, x, b, out);
  } else {
    serial::affine(w, x, b, out);
  }
}

void affine_t(const Matrix& w, std::span<const double> z, std::span<const double> c,
              std::span<double> out) {
  if (use_parallel(w.size())) {
    parallel::affine_t(w, z, c, out);
  } else {
    serial::affine_t(w, z, c, out);
  }
}

void add_outer(Matrix& w, double alpha, std::span<const double> u, std::span<const double> v) {
  if (use_parallel(w.size())) {
    parallel::add_outer(w, alpha, u, v);
  } else {
    serial::add_outer(w, alpha, u, v);
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (use_parallel(x.size())) {
    parallel::axpy(alpha, x, y);
  } else {
    serial::axpy(alpha, x, y);
  }
}

}  // namespace kernels
}  // namespace radae
