#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spinchain/chain.hpp"

namespace spinchain::fcs {

using Complex = std::complex<double>;

enum class BuiltinKind { kinks, magnetization, custom };

// An observable quadratic in the chain fermions with a block-diagonal
// per-mode form: a symmetric 2x2 matrix w1(k) on the even slots of each
// paired mode, eigenvalues (mu, lambda) of w2(k) on the odd slots, and
// diagonal (empty, occupied) entries on the unpaired 0 / pi modes.  The
// total spectrum lives on {support_min, support_min + step, ..., support_max}
// after adding the scalar offset.
struct QuadraticObservable {
  std::string name;
  BuiltinKind kind = BuiltinKind::custom;
  std::function<Eigen::Matrix2d(double)> block_w1;
  std::function<std::pair<double, double>(double)> w2_eigs;
  std::pair<double, double> zero_mode;  // (value on empty slot, on occupied slot)
  std::pair<double, double> pi_mode;
  double offset = 0.0;
  int support_step = 1;
  int support_min = 0;
  int support_max = 0;
};

// Kink number 1/2 sum (1 - X_n X_{n+1}): w1(k) = [[cos k, sin k], [sin k, -cos k]],
// w2 = 0, zero mode (1/2, -1/2), pi mode (-1/2, 1/2), offset L/2, spectrum 0..L.
QuadraticObservable kink_observable(const ChainParams& params);

// Transverse magnetization sum Z_n: w1 = diag(2, -2), w2 = 0, both unpaired
// modes diag(1, -1), spectrum -L..L on even integers.
QuadraticObservable magnetization_observable(const ChainParams& params);

// Diagonal entries of sigma_k = S_k exp(i theta w1(k)) S_k^T, the rotated
// phase matrix entering every thermal characteristic function.
std::pair<Complex, Complex> sigma_entries(const QuadraticObservable& obs, double k,
                                          const ChainParams& params, double theta);

// Thermal characteristic function tr[rho exp(i theta W)], assembled from the
// per-mode factors of both parity sectors and normalized by its theta = 0
// value (the exact partition function evaluated through the same code path).
Complex char_fn_exact(const QuadraticObservable& obs, const ChainParams& params,
                      const Thermal& th, double theta);

// Positive-parity cosh-product term only, self-normalized at theta = 0 so it
// is a genuine characteristic function.
Complex char_fn_ppa(const QuadraticObservable& obs, const ChainParams& params,
                    const Thermal& th, double theta);

enum class Limit { ground_state, infinite_temperature };

// Closed forms of the beta -> inf and beta -> 0 limits for the two built-in
// observables; throws for custom observables.
Complex char_fn_limit(const QuadraticObservable& obs, const ChainParams& params,
                      Limit limit, double theta);

// The unique uniform grid theta_j = 2 pi j / (N step), j = 0..N-1 with
// N = (support_max - support_min) / step + 1, on which `invert` is an exact
// inverse of the trigonometric polynomial.
std::vector<double> theta_grid(const QuadraticObservable& obs);

struct CharacteristicSamples {
  std::vector<double> thetas;
  std::vector<Complex> values;
};

CharacteristicSamples sample_exact(const QuadraticObservable& obs, const ChainParams& params,
                                   const Thermal& th, unsigned threads = 0);
CharacteristicSamples sample_ppa(const QuadraticObservable& obs, const ChainParams& params,
                                 const Thermal& th, unsigned threads = 0);
CharacteristicSamples sample_limit(const QuadraticObservable& obs, const ChainParams& params,
                                   Limit limit);

// Integer-supported probability distribution.
struct Distribution {
  std::vector<int> support;
  std::vector<double> probs;
  // |sum - 1| after clamping, before the final renormalization.
  double norm_residual = 0.0;

  double sum() const;
  double mean() const;
};

// Exact discrete Fourier inversion on the observable's declared lattice.
// Rejects samples that are not on theta_grid(obs) (aliasing guard).  Imaginary
// residues above 1e-10 or probabilities below -1e-12 signal a broken
// characteristic function and throw; smaller negativity is clamped and the
// result renormalized.
Distribution invert(const QuadraticObservable& obs, const CharacteristicSamples& samples);

struct CumulantSet {
  std::vector<double> kappa;  // kappa[m-1] = m-th cumulant
  double operator()(int m) const { return kappa.at(static_cast<std::size_t>(m) - 1); }
};

// Cumulants through the moment route: raw moments of the distribution,
// centralized, then the standard central-moment-to-cumulant relations.
// Supports m_max <= 6.
CumulantSet cumulants(const Distribution& dist, int m_max = 4);

// P_cg(n) = P(n) + [P(n-1) + P(n+1)] / 2 on even n, 0 on odd n, renormalized.
// Restores the even-kink structure the plain PPA distribution lacks.
Distribution coarse_grained_ppa(const Distribution& ppa_dist);

// Grid-sample + invert conveniences.
Distribution distribution_exact(const QuadraticObservable& obs, const ChainParams& params,
                                const Thermal& th, unsigned threads = 0);
Distribution distribution_ppa(const QuadraticObservable& obs, const ChainParams& params,
                              const Thermal& th, unsigned threads = 0);
Distribution distribution_limit(const QuadraticObservable& obs, const ChainParams& params,
                                Limit limit);

}  // namespace spinchain::fcs
