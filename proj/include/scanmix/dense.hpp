#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scanmix/errors.hpp"
#include "scanmix/rational.hpp"

namespace scanmix {

template <class S>
struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<S> a;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, S(0)) {}

  S& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const S& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  S* row(std::size_t r) { return a.data() + r * cols; }
  const S* row(std::size_t r) const { return a.data() + r * cols; }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = S(1);
    return m;
  }
};

// Row-stochastic kernel with uniform rows: row r puts mass 1/deg(r) on each
// listed column. CSR layout; this covers every update rule in the project
// and keeps the storage scalar-free.
struct RowUniformKernel {
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> row_ptr;  // size rows+1
  std::vector<std::uint32_t> col;

  std::size_t row_degree(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
};

namespace kernels {

// M <- M * K, one output row per input row. The parallel path splits on
// rows; each row is computed independently and serially, so thread count
// never changes the result bit for bit.
template <class S>
void apply_right_serial(DenseMatrix<S>& m, const RowUniformKernel& k) {
  if (m.cols != k.rows) fail(Errc::DomainMismatch, "matrix/kernel shape");
  std::vector<S> acc(k.cols, S(0));
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (auto& v : acc) v = S(0);
    const S* row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (row[c] == S(0)) continue;
      const S share = row[c] / static_cast<unsigned long>(k.row_degree(c));
      for (std::size_t e = k.row_ptr[c]; e < k.row_ptr[c + 1]; ++e) acc[k.col[e]] += share;
    }
    S* out = m.row(r);
    for (std::size_t c = 0; c < k.cols; ++c) out[c] = acc[c];
  }
}

template <class S>
void apply_right(DenseMatrix<S>& m, const RowUniformKernel& k) {
  if (m.cols != k.rows) fail(Errc::DomainMismatch, "matrix/kernel shape");
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel
  {
    std::vector<S> acc(k.cols, S(0));
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      for (auto& v : acc) v = S(0);
      const S* row = m.row(r);
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (row[c] == S(0)) continue;
        const S share = row[c] / static_cast<unsigned long>(k.row_degree(c));
        for (std::size_t e = k.row_ptr[c]; e < k.row_ptr[c + 1]; ++e) acc[k.col[e]] += share;
      }
      S* out = m.row(r);
      for (std::size_t c = 0; c < k.cols; ++c) out[c] = acc[c];
    }
  }
}

// K * f for a column functional f (gather form, no write races).
template <class S>
std::vector<S> apply_vec_serial(const RowUniformKernel& k, const std::vector<S>& f) {
  if (f.size() != k.cols) fail(Errc::DomainMismatch, "kernel/functional shape");
  std::vector<S> out(k.rows, S(0));
  for (std::size_t r = 0; r < k.rows; ++r) {
    S sum(0);
    for (std::size_t e = k.row_ptr[r]; e < k.row_ptr[r + 1]; ++e) sum += f[k.col[e]];
    out[r] = sum / static_cast<unsigned long>(k.row_degree(r));
  }
  return out;
}

template <class S>
std::vector<S> apply_vec(const RowUniformKernel& k, const std::vector<S>& f) {
  if (f.size() != k.cols) fail(Errc::DomainMismatch, "kernel/functional shape");
  std::vector<S> out(k.rows, S(0));
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(k.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    S sum(0);
    for (std::size_t e = k.row_ptr[r]; e < k.row_ptr[r + 1]; ++e) sum += f[k.col[e]];
    out[r] = sum / static_cast<unsigned long>(k.row_degree(r));
  }
  return out;
}

// Row distribution vs reference, max over rows of the total variation
// distance. max is exact, so the reduction order cannot shift the result.
template <class S>
S max_row_tv_serial(const DenseMatrix<S>& m, const std::vector<S>& pi) {
  if (m.cols != pi.size()) fail(Errc::DomainMismatch, "matrix/reference shape");
  S best(0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    S sum(0);
    const S* row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) sum += scalar_abs(row[c] - pi[c]);
    sum /= 2u;
    if (sum > best) best = sum;
  }
  return best;
}

template <class S>
S max_row_tv(const DenseMatrix<S>& m, const std::vector<S>& pi) {
  if (m.cols != pi.size()) fail(Errc::DomainMismatch, "matrix/reference shape");
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(m.rows);
  S best(0);
#pragma omp parallel
  {
    S local(0);
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      S sum(0);
      const S* row = m.row(r);
      for (std::size_t c = 0; c < m.cols; ++c) sum += scalar_abs(row[c] - pi[c]);
      sum /= 2u;
      if (sum > local) local = sum;
    }
#pragma omp critical(scanmix_max_row_tv)
    {
      if (local > best) best = local;
    }
  }
  return best;
}

}  // namespace kernels
}  // namespace scanmix
