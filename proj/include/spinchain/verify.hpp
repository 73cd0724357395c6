#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spinchain/fcs.hpp"

namespace spinchain::verify {

// Worst deviation seen across a comparison grid, with the offending point.
struct Deviation {
  double max = 0.0;
  std::string where;

  void update(double d, const std::string& w) {
    if (d > max) {
      max = d;
      where = w;
    }
  }
};

// |z_analytic / z_oracle - 1| of the exact partition function over the grid.
// flip_zb_minus negates the boundary term of the minus sector before the
// comparison; it exists so the harness can prove it catches a broken build.
Deviation check_partition_vs_oracle(std::span<const int> Ls, std::span<const double> gammas,
                                    std::span<const double> gs, std::span<const double> betas,
                                    bool flip_zb_minus = false);

// Same for the parity-resolved pair (Z+, Z-).
Deviation check_sectors_vs_oracle(std::span<const int> Ls, std::span<const double> gammas,
                                  std::span<const double> gs, std::span<const double> betas,
                                  bool flip_zb_minus = false);

// Sector ground energies against the minima of the oracle parity blocks.
Deviation check_ground_energies(std::span<const int> Ls, std::span<const double> gammas,
                                std::span<const double> gs);

// Sup-norm distance between the analytic thermal distribution and the oracle
// histogram, gamma = 1.
Deviation check_fcs_vs_oracle(fcs::BuiltinKind kind, std::span<const int> Ls,
                              std::span<const double> gs, std::span<const double> betas);

// Largest odd-n mass of the exact kink distribution over the grid (should be
// zero: kinks come in pairs under periodic boundaries).
Deviation check_kink_parity(std::span<const int> Ls, std::span<const double> gs,
                            std::span<const double> betas);

// Largest odd-n probability of the PPA kink distribution at one point; the
// PPA genuinely populates odd kink numbers.
double ppa_max_odd_mass(int L, double g, double beta);

struct ParityAlgebraDeviations {
  Deviation traces;
  Deviation products;
  Deviation exponentials;
};

// Random graded-block instances (n = 1..4 modes) checked against the dense
// restricted construction: closed-form traces, the product identity, and the
// exponential identity.
ParityAlgebraDeviations check_parity_algebra(int instances, std::uint64_t seed);

struct Options {
  int l_max = 10;           // largest chain fed to the dense oracle
  std::uint64_t seed = 12345;
  bool flip_zb_minus = false;  // fault injection for self-testing the harness
};

struct CheckResult {
  std::string name;
  double max_dev;
  double tolerance;
  bool pass;
  std::string worst_case;
};

// The oracle-vs-analytic comparison grid behind `spinchain oracle-check`.
// Prints one line per check to `log`; returns all results.
std::vector<CheckResult> run_all(const Options& opts, std::ostream& log);

}  // namespace spinchain::verify
