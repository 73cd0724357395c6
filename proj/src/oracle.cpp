#include "spinchain/oracle.hpp"

#include <lapacke.h>

#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spinchain::oracle {

namespace {

std::size_t check_sites(int L) {
  if (L < 2 || L > kMaxSites || L % 2 != 0)
    throw std::invalid_argument("oracle: L must be even and within 2..12");
  return std::size_t{1} << L;
}

int z_at(std::size_t state, int site) { return (state >> site) & 1u ? -1 : 1; }

void check_symmetric(const Eigen::MatrixXd& m, const char* who) {
  if (m.rows() != m.cols() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

}  // namespace

DenseOperator build_hamiltonian(const ChainParams& params) {
  const std::size_t dim = check_sites(params.L);
  DenseOperator op{params.L, Eigen::MatrixXd::Zero(dim, dim)};
  const double xx = -(1.0 + params.gamma) / 2.0;
  for (std::size_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int n = 0; n < params.L; ++n) diag -= params.g * z_at(s, n);
    op.matrix(s, s) += diag;
    for (int n = 0; n < params.L; ++n) {
      const int n1 = (n + 1) % params.L;
      const std::size_t t = s ^ ((std::size_t{1} << n) | (std::size_t{1} << n1));
      // <t| X_n X_{n+1} |s> = 1;  <t| Y_n Y_{n+1} |s> = -z_n(s) z_{n+1}(s)
      const double yy = (1.0 - params.gamma) / 2.0 * z_at(s, n) * z_at(s, n1);
      op.matrix(t, s) += xx + yy;
    }
  }
  return op;
}

DenseOperator build_kink_operator(int L) {
  const std::size_t dim = check_sites(L);
  DenseOperator op{L, Eigen::MatrixXd::Zero(dim, dim)};
  for (std::size_t s = 0; s < dim; ++s) {
    op.matrix(s, s) += L / 2.0;
    for (int n = 0; n < L; ++n) {
      const int n1 = (n + 1) % L;
      const std::size_t t = s ^ ((std::size_t{1} << n) | (std::size_t{1} << n1));
      op.matrix(t, s) -= 0.5;
    }
  }
  return op;
}

DenseOperator build_magnetization_operator(int L) {
  const std::size_t dim = check_sites(L);
  DenseOperator op{L, Eigen::MatrixXd::Zero(dim, dim)};
  for (std::size_t s = 0; s < dim; ++s) {
    double m = 0.0;
    for (int n = 0; n < L; ++n) m += z_at(s, n);
    op.matrix(s, s) = m;
  }
  return op;
}

Eigen::VectorXd parity_diagonal(int L) {
  const std::size_t dim = check_sites(L);
  Eigen::VectorXd p(dim);
  for (std::size_t s = 0; s < dim; ++s)
    p(s) = std::popcount(s) % 2 == 0 ? 1.0 : -1.0;
  return p;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd a = m;
  Eigen::VectorXd w(a.rows());
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', static_cast<int>(a.rows()),
                                  a.data(), static_cast<int>(a.rows()), w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed");
  return w;
}

void eigensystem(const Eigen::MatrixXd& m, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
  evecs = m;
  evals.resize(m.rows());
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<int>(m.rows()),
                                  evecs.data(), static_cast<int>(m.rows()), evals.data());
  if (info != 0) throw std::runtime_error("dsyevd failed");
}

LogScaledReal log_trace_exp(const Eigen::VectorXd& evals, double beta) {
  const double e0 = evals.minCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) acc += std::exp(-beta * (evals(i) - e0));
  return LogScaledReal::from_log(-beta * e0 + std::log(acc));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> parity_blocks(const DenseOperator& h) {
  const std::size_t dim = check_sites(h.sites);
  std::vector<int> even, odd;
  even.reserve(dim / 2);
  odd.reserve(dim / 2);
  for (std::size_t s = 0; s < dim; ++s)
    (std::popcount(s) % 2 == 0 ? even : odd).push_back(static_cast<int>(s));
  auto gather = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd block(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        block(i, j) = h.matrix(idx[i], idx[j]);
    return block;
  };
  return {gather(even), gather(odd)};
}

ParityResolvedZ parity_resolved_z(const DenseOperator& h, double beta) {
  const auto [even, odd] = parity_blocks(h);
  return {log_trace_exp(eigenvalues(even), beta), log_trace_exp(eigenvalues(odd), beta)};
}

FcsPlan::FcsPlan(const DenseOperator& w, const DenseOperator& h) {
  if (w.sites != h.sites || w.matrix.rows() != h.matrix.rows())
    throw std::invalid_argument("FcsPlan: operator dimensions differ");
  check_sites(w.sites);
  check_symmetric(w.matrix, "FcsPlan(W)");
  check_symmetric(h.matrix, "FcsPlan(H)");
  Eigen::MatrixXd w_vecs, h_vecs;
  eigensystem(w.matrix, w_evals_, w_vecs);
  eigensystem(h.matrix, h_evals_, h_vecs);
  for (Eigen::Index i = 0; i < w_evals_.size(); ++i)
    if (std::abs(w_evals_(i) - std::round(w_evals_(i))) > 1e-6)
      throw std::invalid_argument("FcsPlan: observable spectrum is not near-integer");
  overlap_sq_ = (w_vecs.transpose() * h_vecs).array().square();
}

fcs::Distribution FcsPlan::at_beta(double beta) const {
  if (beta < 0.0) throw std::invalid_argument("FcsPlan: beta must be >= 0");
  const double e0 = h_evals_.minCoeff();
  Eigen::VectorXd r = (-beta * (h_evals_.array() - e0)).exp();
  r /= r.sum();
  const Eigen::VectorXd weights = overlap_sq_ * r;

  std::map<int, double> grouped;
  for (Eigen::Index i = 0; i < w_evals_.size(); ++i)
    grouped[static_cast<int>(std::llround(w_evals_(i)))] += weights(i);

  const int lo = grouped.begin()->first;
  const int hi = grouped.rbegin()->first;
  int step = 0;
  for (const auto& [value, p] : grouped) step = std::gcd(step, value - lo);
  if (step == 0) step = 1;

  fcs::Distribution dist;
  for (int v = lo; v <= hi; v += step) {
    dist.support.push_back(v);
    const auto it = grouped.find(v);
    dist.probs.push_back(it == grouped.end() ? 0.0 : it->second);
  }
  dist.norm_residual = std::abs(dist.sum() - 1.0);
  return dist;
}

fcs::Distribution thermal_fcs(const DenseOperator& w, const DenseOperator& h, double beta) {
  return FcsPlan(w, h).at_beta(beta);
}

}  // namespace spinchain::oracle
