#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/log_scaled.hpp"

namespace spinchain::partition {

// The exact partition function split into its four sector products,
//   Z = (Z_F+ + Z_B+ + Z_F- - Z_B-) / 2,
// where Z_F is the cosh product and Z_B the sinh product over each full
// momentum set.  Z_B- contains the signed k = 0 energy 2 (g - 1) and flips
// sign across g = 1; its sign rides in the LogScaledReal.
struct PartitionBreakdown {
  LogScaledReal z_f_plus;
  LogScaledReal z_b_plus;
  LogScaledReal z_f_minus;
  LogScaledReal z_b_minus;
  LogScaledReal z_plus;    // (Z_F+ + Z_B+) / 2
  LogScaledReal z_minus;   // (Z_F- - Z_B-) / 2
  LogScaledReal z_exact;
  LogScaledReal z_ppa;     // = Z_F+
  std::optional<LogScaledReal> z_two_level;  // gamma = 1 only
  // Z_F- - Z_B- cancels catastrophically for beta -> inf, g > 1; set when
  // that subtraction lost more than 12 digits against its anchor, i.e.
  // z_minus carries no reliable digits.
  bool cancellation_z_minus = false;
  // Same condition on the four-term combination behind z_exact itself.
  bool cancellation_total = false;

  bool any_cancellation() const { return cancellation_z_minus || cancellation_total; }
};

PartitionBreakdown z_exact(const ChainParams& params, const Thermal& th);

// Positive-parity cosh product only: prod_{K+} 2 cosh(beta eps_k / 2).
LogScaledReal z_ppa(const ChainParams& params, const Thermal& th);

// exp(-beta E+) + exp(-beta E-).  Ising chain only; throws for gamma != 1.
LogScaledReal z_two_level(const ChainParams& params, const Thermal& th);

enum class RatioKind { ppa, two_level };

// Z_approx / Z_exact on the (beta, g) grid; row-major, rows = beta.
// Cells are independent and evaluated by a parallel map; threads = 0 picks
// the default count.
std::vector<double> ratio_map(const ChainParams& base, std::span<const double> betas,
                              std::span<const double> gs, RatioKind which,
                              unsigned threads = 0);

}  // namespace spinchain::partition
