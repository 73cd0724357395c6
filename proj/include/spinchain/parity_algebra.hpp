#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

namespace spinchain::parity {

// Per-block traces entering the restricted-product identities.
struct GradedTraces {
  std::complex<double> tr_full;
  std::complex<double> tr_even;
  std::complex<double> tr_odd;
};

// A parity-graded operator on one mode space: dim 4 for a paired (k, -k)
// mode, dim 2 for the unpaired 0 / pi modes.  Basis order puts the even
// slots first (|00>, |11> then |01>, |10> for dim 4; |0> then |1> for
// dim 2).  The even part vanishes on the odd slots and vice versa; graded
// operators never mix the two (parity-mixing operators are out of scope).
class GradedBlock {
 public:
  // Both parts are full-size matrices carrying a zero block on the
  // complementary slots; throws if an entry violates the grading.
  static GradedBlock from_parts(Eigen::MatrixXcd even, Eigen::MatrixXcd odd);
  // Splits a block-diagonal operator; throws if the even-odd corners are
  // nonzero.
  static GradedBlock from_full(const Eigen::MatrixXcd& full);

  int dim() const { return static_cast<int>(even_.rows()); }
  int even_dim() const { return dim() / 2; }
  const Eigen::MatrixXcd& even_part() const { return even_; }
  const Eigen::MatrixXcd& odd_part() const { return odd_; }
  Eigen::MatrixXcd full() const { return even_ + odd_; }
  GradedTraces traces() const;

 private:
  GradedBlock(Eigen::MatrixXcd even, Eigen::MatrixXcd odd)
      : even_(std::move(even)), odd_(std::move(odd)) {}
  Eigen::MatrixXcd even_;
  Eigen::MatrixXcd odd_;
};

enum class Sector { P, N };

// Closed-form traces of the parity-restricted tensor products:
//   tr P(⊗ O_i) = (prod tr O_i + prod (tr O_i^even - tr O_i^odd)) / 2,
//   tr N(⊗ O_i) = (prod tr O_i - prod (tr O_i^even - tr O_i^odd)) / 2.
// Accumulation switches to a log-scaled representation only when a running
// magnitude leaves [1e-150, 1e150]; below that the arithmetic is plain
// complex multiplication.
std::complex<double> restricted_trace_P(std::span<const GradedBlock> blocks);
std::complex<double> restricted_trace_N(std::span<const GradedBlock> blocks);

// Explicit dense construction of the restricted product by the recursion
//   P_{n+1} = P_n ⊗ O^even + N_n ⊗ O^odd   (and the N analogue),
// on the full tensor-product space.  This is the brute-force reference the
// closed-form traces are certified against; total dimension is capped at
// 4096.
Eigen::MatrixXcd dense_restricted(std::span<const GradedBlock> blocks, Sector sector);

}  // namespace spinchain::parity
