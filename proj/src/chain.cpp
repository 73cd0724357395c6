#include "spinchain/chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinchain {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kGaplessEps = 1e-14;
}  // namespace

ChainParams::ChainParams(int sites, double field, double anisotropy)
    : L(sites), g(field), gamma(anisotropy) {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("ChainParams: L must be even and >= 2");
  if (!(g >= 0.0) || !std::isfinite(g))
    throw std::invalid_argument("ChainParams: g must be finite and >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("ChainParams: gamma must be in [0, 1]");
}

Thermal::Thermal(double beta_in) : beta(beta_in) {
  if (!std::isfinite(beta) || beta < 0.0)
    throw std::invalid_argument("Thermal: beta must be finite and >= 0");
}

MomentumGrid momentum_grids(const ChainParams& params) {
  MomentumGrid grid;
  const int half = params.L / 2;
  grid.k_plus.reserve(half);
  for (int j = 1; j <= half; ++j)
    grid.k_plus.push_back(kPi * (2 * j - 1) / params.L);
  grid.k_minus.reserve(half - 1);
  for (int j = 1; j < half; ++j)
    grid.k_minus.push_back(2.0 * kPi * j / params.L);
  return grid;
}

double dispersion(double k, const ChainParams& params) {
  return 2.0 * std::hypot(params.g - std::cos(k), params.gamma * std::sin(k));
}

double epsilon_zero_signed(const ChainParams& params) { return 2.0 * (params.g - 1.0); }
double epsilon_pi_signed(const ChainParams& params) { return 2.0 * (params.g + 1.0); }

double bogoliubov_angle(double k, const ChainParams& params) {
  if (dispersion(k, params) < kGaplessEps) return 0.0;  // gapless point convention
  return std::atan2(2.0 * params.gamma * std::sin(k), 2.0 * (std::cos(k) - params.g));
}

ModeData mode_data(double k, const ChainParams& params) {
  return {k, dispersion(k, params), bogoliubov_angle(k, params)};
}

GibbsTraces mode_gibbs_traces(double k, const ChainParams& params, const Thermal& th) {
  const double x = th.beta * dispersion(k, params) / 2.0;
  GibbsTraces out;
  out.full = LogScaledReal::from_log(2.0 * log_2cosh(x));  // 4 cosh^2 x
  out.even_minus_odd =
      x == 0.0 ? LogScaledReal{} : LogScaledReal::from_log(2.0 * log_2sinh_abs(x));
  return out;
}

ZeroPiGibbs zero_pi_gibbs(const ChainParams& params, const Thermal& th) {
  const double b0 = th.beta * (params.g - 1.0);
  const double bp = th.beta * (params.g + 1.0);
  ZeroPiGibbs out;
  out.zero_occupied = LogScaledReal::from_log(-b0);
  out.zero_empty = LogScaledReal::from_log(b0);
  out.pi_occupied = LogScaledReal::from_log(-bp);
  out.pi_empty = LogScaledReal::from_log(bp);
  return out;
}

GroundEnergies ground_energies(const ChainParams& params) {
  const MomentumGrid grid = momentum_grids(params);
  double e_plus = 0.0, e_minus = 0.0;
  for (double k : grid.k_plus) e_plus -= dispersion(k, params);
  for (double k : grid.k_minus) e_minus -= dispersion(k, params);
  e_minus -= 2.0;
  return {e_plus, e_minus};
}

Gaps gaps(const ChainParams& params) {
  if (params.gamma != 1.0)
    throw std::invalid_argument("gaps: defined for the Ising chain (gamma = 1) only");
  const GroundEnergies e = ground_energies(params);
  const double delta = e.e_minus - e.e_plus;
  const double big =
      4.0 * std::sqrt(params.g * params.g - 2.0 * params.g * std::cos(kPi / params.L) + 1.0);
  return {delta, big};
}

}  // namespace spinchain
