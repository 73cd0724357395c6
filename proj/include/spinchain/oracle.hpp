#pragma once

#include <Eigen/Dense>
#include <utility>

#include "spinchain/chain.hpp"
#include "spinchain/fcs.hpp"
#include "spinchain/log_scaled.hpp"

namespace spinchain::oracle {

// Brute-force reference in the full 2^L spin space.  Everything here is
// deliberately simple and dense: the point is to certify the analytic
// modules, not to be fast.
inline constexpr int kMaxSites = 12;

struct DenseOperator {
  int sites = 0;
  Eigen::MatrixXd matrix;  // 2^sites x 2^sites, real symmetric
};

// -sum_n [(1+gamma)/2 X_n X_{n+1} + (1-gamma)/2 Y_n Y_{n+1} + g Z_n],
// periodic closure X_{L+1} = X_1.  Basis: bit n of the index is spin n,
// bit 0 -> Z = +1.
DenseOperator build_hamiltonian(const ChainParams& params);

// Kink number 1/2 sum (1 - X_n X_{n+1}) and magnetization sum Z_n.
DenseOperator build_kink_operator(int L);
DenseOperator build_magnetization_operator(int L);

// Diagonal of prod_n Z_n: +1 on even-popcount states, -1 on odd.
Eigen::VectorXd parity_diagonal(int L);

// All eigenvalues of a symmetric matrix (LAPACK dsyevd, values only).
Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m);
// Eigenvalues and orthonormal eigenvectors.
void eigensystem(const Eigen::MatrixXd& m, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs);

// log tr exp(-beta H) via log-sum-exp over a spectrum.
LogScaledReal log_trace_exp(const Eigen::VectorXd& evals, double beta);

// H restricted to the even- and odd-popcount sectors.  The parity operator
// is diagonal in the computational basis, so the split is exact; classifying
// eigenvectors by parity expectation would misassign degenerate levels.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> parity_blocks(const DenseOperator& h);

struct ParityResolvedZ {
  LogScaledReal z_plus;
  LogScaledReal z_minus;
};
ParityResolvedZ parity_resolved_z(const DenseOperator& h, double beta);

// Thermal eigenvalue distribution of W in the Gibbs state of H: rotate the
// Boltzmann weights into W's eigenbasis and group the diagonal by eigenvalue.
// W's spectrum must sit within 1e-6 of integers.  The eigenwork depends only
// on (W, H), so the plan is reusable across temperatures.
class FcsPlan {
 public:
  FcsPlan(const DenseOperator& w, const DenseOperator& h);
  fcs::Distribution at_beta(double beta) const;

 private:
  Eigen::VectorXd w_evals_;
  Eigen::VectorXd h_evals_;
  Eigen::MatrixXd overlap_sq_;  // (V_W^T V_H) squared elementwise
};

fcs::Distribution thermal_fcs(const DenseOperator& w, const DenseOperator& h, double beta);

}  // namespace spinchain::oracle
