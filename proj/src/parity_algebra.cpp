#include "spinchain/parity_algebra.hpp"

#include <stdexcept>

#include "spinchain/log_scaled.hpp"

namespace spinchain::parity {

namespace {

bool even_slot(int index, int dim) { return index < dim / 2; }

void check_grading(const Eigen::MatrixXcd& part, int dim, bool even) {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const bool allowed = even ? (even_slot(i, dim) && even_slot(j, dim))
                                : (!even_slot(i, dim) && !even_slot(j, dim));
      if (!allowed && part(i, j) != std::complex<double>(0.0, 0.0))
        throw std::invalid_argument("GradedBlock: entry outside the graded block");
    }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ScaledComplex scaled_product(std::span<const GradedBlock> blocks, bool difference) {
  ScaledComplex acc = ScaledComplex::one();
  for (const auto& b : blocks) {
    const GradedTraces t = b.traces();
    acc *= difference ? (t.tr_even - t.tr_odd) : t.tr_full;
  }
  return acc;
}

std::complex<double> restricted_trace(std::span<const GradedBlock> blocks, Sector sector) {
  if (blocks.empty())
    throw std::invalid_argument("restricted_trace: empty block list");
  const ScaledComplex full = scaled_product(blocks, false);
  const ScaledComplex diff = scaled_product(blocks, true);
  const double s = sector == Sector::P ? 1.0 : -1.0;
  const ScaledComplex terms[2] = {full, ScaledComplex{s * diff.value, diff.log_scale}};
  const ScaledComplex sum = scaled_sum(terms);
  return 0.5 * sum.descaled();
}

}  // namespace

GradedBlock GradedBlock::from_parts(Eigen::MatrixXcd even, Eigen::MatrixXcd odd) {
  const int dim = static_cast<int>(even.rows());
  if ((dim != 2 && dim != 4) || even.cols() != dim || odd.rows() != dim || odd.cols() != dim)
    throw std::invalid_argument("GradedBlock: parts must be square of dim 2 or 4");
  check_grading(even, dim, true);
  check_grading(odd, dim, false);
  return GradedBlock(std::move(even), std::move(odd));
}

GradedBlock GradedBlock::from_full(const Eigen::MatrixXcd& full) {
  const int dim = static_cast<int>(full.rows());
  if ((dim != 2 && dim != 4) || full.cols() != dim)
    throw std::invalid_argument("GradedBlock: operator must be square of dim 2 or 4");
  const int h = dim / 2;
  if (full.block(0, h, h, h).cwiseAbs().maxCoeff() != 0.0 ||
      full.block(h, 0, h, h).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("GradedBlock: operator mixes parity sectors");
  Eigen::MatrixXcd even = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd odd = Eigen::MatrixXcd::Zero(dim, dim);
  even.topLeftCorner(h, h) = full.topLeftCorner(h, h);
  odd.bottomRightCorner(h, h) = full.bottomRightCorner(h, h);
  return GradedBlock(std::move(even), std::move(odd));
}

GradedTraces GradedBlock::traces() const {
  GradedTraces t;
  t.tr_even = even_.trace();
  t.tr_odd = odd_.trace();
  t.tr_full = t.tr_even + t.tr_odd;
  return t;
}

std::complex<double> restricted_trace_P(std::span<const GradedBlock> blocks) {
  return restricted_trace(blocks, Sector::P);
}

std::complex<double> restricted_trace_N(std::span<const GradedBlock> blocks) {
  return restricted_trace(blocks, Sector::N);
}

Eigen::MatrixXcd dense_restricted(std::span<const GradedBlock> blocks, Sector sector) {
  if (blocks.empty())
    throw std::invalid_argument("dense_restricted: empty block list");
  long total = 1;
  for (const auto& b : blocks) {
    total *= b.dim();
    if (total > 4096)
      throw std::invalid_argument("dense_restricted: total dimension exceeds 4096");
  }
  Eigen::MatrixXcd p = blocks[0].even_part();
  Eigen::MatrixXcd n = blocks[0].odd_part();
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    Eigen::MatrixXcd p_next =
        kron(p, blocks[i].even_part()) + kron(n, blocks[i].odd_part());
    Eigen::MatrixXcd n_next =
        kron(n, blocks[i].even_part()) + kron(p, blocks[i].odd_part());
    p = std::move(p_next);
    n = std::move(n_next);
  }
  return sector == Sector::P ? p : n;
}

}  // namespace spinchain::parity
