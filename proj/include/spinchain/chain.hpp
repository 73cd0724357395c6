#pragma once

#include <vector>

#include "spinchain/log_scaled.hpp"

namespace spinchain {

// Physical knobs of the periodic anisotropic XY chain in a transverse field.
// The exchange J is the unit of energy.  gamma = 1 is the transverse-field
// Ising chain, gamma = 0 the isotropic XY chain.
struct ChainParams {
  ChainParams(int sites, double field, double anisotropy = 1.0);

  int L;         // even, >= 2
  double g;      // >= 0
  double gamma;  // in [0, 1]
};

struct Thermal {
  explicit Thermal(double beta_in);
  double beta;  // >= 0, finite; zero-T limits have dedicated closed forms
};

// Positive half-grids of the two parity sectors.  Doubling each with its
// negatives (and appending 0, pi to the minus set) recovers the full
// antiperiodic / periodic momentum sets of size L.
struct MomentumGrid {
  std::vector<double> k_plus;   // pi/L, 3pi/L, ..., pi(L-1)/L
  std::vector<double> k_minus;  // 2pi/L, 4pi/L, ..., pi(L-2)/L
  bool zero_pi_in_negative_sector = true;  // always, for even L
};
MomentumGrid momentum_grids(const ChainParams& params);

// Quasiparticle energy 2 sqrt((g - cos k)^2 + gamma^2 sin^2 k) >= 0.
double dispersion(double k, const ChainParams& params);

// Signed single-mode energies of the unpaired momenta.  cosh factors absorb
// the sign of the k = 0 value; sinh factors flip with it across g = 1.
double epsilon_zero_signed(const ChainParams& params);  // 2 (g - 1)
double epsilon_pi_signed(const ChainParams& params);    // 2 (g + 1)

// Angle of the rotation diagonalizing the paired-mode block:
// cos(theta) eps = 2 (cos k - g), sin(theta) eps = 2 gamma sin k.
// Returns 0 at points where eps vanishes (possible only for gamma = 0).
double bogoliubov_angle(double k, const ChainParams& params);

struct ModeData {
  double k;
  double epsilon;
  double theta;
};
ModeData mode_data(double k, const ChainParams& params);

// Traces of the per-mode Gibbs block: the full trace 4 cosh^2(beta eps / 2)
// and the even-minus-odd combination 4 sinh^2(beta eps / 2).
struct GibbsTraces {
  LogScaledReal full;
  LogScaledReal even_minus_odd;
};
GibbsTraces mode_gibbs_traces(double k, const ChainParams& params, const Thermal& th);

// Diagonal Gibbs weights of the unpaired k = 0, pi modes.  The empty slot of
// mode 0 has energy -(g - 1), so its weight is exp(+beta (g - 1)); occupying
// it costs 2 (g - 1).  Same pattern at pi with g + 1.
struct ZeroPiGibbs {
  LogScaledReal zero_occupied;  // exp(-beta (g - 1))
  LogScaledReal zero_empty;     // exp(+beta (g - 1))
  LogScaledReal pi_occupied;    // exp(-beta (g + 1))
  LogScaledReal pi_empty;       // exp(+beta (g + 1))
};
ZeroPiGibbs zero_pi_gibbs(const ChainParams& params, const Thermal& th);

// Lowest energy in each parity sector:
//   E+ = -sum_{k+} eps_k,   E- = -sum_{k-} eps_k - 2.
struct GroundEnergies {
  double e_plus;
  double e_minus;
};
GroundEnergies ground_energies(const ChainParams& params);

// Sector gap delta = E- - E+ (computed exactly, not asymptotically) and the
// single-particle excitation gap Delta = 4 sqrt(g^2 - 2 g cos(pi/L) + 1).
// Defined for the Ising chain only; throws for gamma != 1.
struct Gaps {
  double sector_gap;        // delta
  double quasiparticle_gap; // Delta
};
Gaps gaps(const ChainParams& params);

}  // namespace spinchain
