#include "spinchain/partition.hpp"

#include <cmath>
#include <stdexcept>

#include "spinchain/parallel.hpp"

namespace spinchain::partition {

namespace {

LogScaledReal half(const LogScaledReal& v) {
  return LogScaledReal::from_log(v.log_magnitude() - std::log(2.0), v.sign());
}

}  // namespace

PartitionBreakdown z_exact(const ChainParams& params, const Thermal& th) {
  const MomentumGrid grid = momentum_grids(params);
  PartitionBreakdown out;

  double log_f_plus = 0.0, log_b_plus = 0.0, log_f_minus = 0.0, log_b_minus = 0.0;
  // log Z_F- - log Z_B- accumulated per mode: a sum of small positive terms,
  // so the minus-sector difference survives the regime where the two products
  // agree to hundreds of digits (beta large, g > 1).
  double log_diff_minus = 0.0;
  bool b_plus_zero = false, b_minus_zero = false;
  for (double k : grid.k_plus) {
    const GibbsTraces t = mode_gibbs_traces(k, params, th);
    log_f_plus += t.full.log_magnitude();
    if (t.even_minus_odd.is_zero())
      b_plus_zero = true;
    else
      log_b_plus += t.even_minus_odd.log_magnitude();
  }
  for (double k : grid.k_minus) {
    const GibbsTraces t = mode_gibbs_traces(k, params, th);
    log_f_minus += t.full.log_magnitude();
    if (t.even_minus_odd.is_zero())
      b_minus_zero = true;
    else {
      log_b_minus += t.even_minus_odd.log_magnitude();
      log_diff_minus += t.full.log_magnitude() - t.even_minus_odd.log_magnitude();
    }
  }

  // Unpaired 0, pi factors of the minus sector; x0 is signed through g = 1.
  const double x0 = th.beta * epsilon_zero_signed(params) / 2.0;
  const double xp = th.beta * epsilon_pi_signed(params) / 2.0;
  log_f_minus += log_2cosh(x0) + log_2cosh(xp);
  int b_minus_sign = 1;
  if (x0 == 0.0 || xp == 0.0)
    b_minus_zero = true;
  else {
    log_b_minus += log_2sinh_abs(x0) + log_2sinh_abs(xp);
    log_diff_minus += log_2cosh(x0) - log_2sinh_abs(x0) + log_2cosh(xp) - log_2sinh_abs(xp);
    b_minus_sign = x0 > 0.0 ? 1 : -1;
  }

  out.z_f_plus = LogScaledReal::from_log(log_f_plus);
  out.z_b_plus = b_plus_zero ? LogScaledReal{} : LogScaledReal::from_log(log_b_plus);
  out.z_f_minus = LogScaledReal::from_log(log_f_minus);
  out.z_b_minus =
      b_minus_zero ? LogScaledReal{} : LogScaledReal::from_log(log_b_minus, b_minus_sign);

  const LogScaledReal plus_terms[] = {out.z_f_plus, out.z_b_plus};
  out.z_plus = half(log_sum_signed(plus_terms).value);

  if (b_minus_zero || b_minus_sign < 0) {
    // No cancellation possible: the boundary term is zero or adds.
    const LogScaledReal minus_terms[] = {out.z_f_minus, -out.z_b_minus};
    out.z_minus = half(log_sum_signed(minus_terms).value);
  } else {
    // Z_F- - Z_B- = Z_B- expm1(log Z_F- - log Z_B-), with the exponent known
    // to machine accuracy from the per-mode sums.
    out.cancellation_z_minus = log_diff_minus < 1e-12;
    const double diff = log_diff_minus < 700.0 ? std::expm1(log_diff_minus)
                                               : std::exp(log_diff_minus);
    out.z_minus = half(LogScaledReal::from_log(log_b_minus) *
                       LogScaledReal::from_value(diff));
  }

  const LogScaledReal all_terms[] = {out.z_f_plus, out.z_b_plus, out.z_f_minus,
                                     -out.z_b_minus};
  out.cancellation_total = log_sum_signed(all_terms).cancellation;
  out.z_exact = out.z_plus + out.z_minus;
  out.z_ppa = out.z_f_plus;
  if (params.gamma == 1.0) out.z_two_level = z_two_level(params, th);
  return out;
}

LogScaledReal z_ppa(const ChainParams& params, const Thermal& th) {
  const MomentumGrid grid = momentum_grids(params);
  double log_f = 0.0;
  for (double k : grid.k_plus)
    log_f += mode_gibbs_traces(k, params, th).full.log_magnitude();
  return LogScaledReal::from_log(log_f);
}

LogScaledReal z_two_level(const ChainParams& params, const Thermal& th) {
  if (params.gamma != 1.0)
    throw std::invalid_argument("z_two_level: defined for gamma = 1 only");
  const GroundEnergies e = ground_energies(params);
  return LogScaledReal::from_log(-th.beta * e.e_plus) +
         LogScaledReal::from_log(-th.beta * e.e_minus);
}

std::vector<double> ratio_map(const ChainParams& base, std::span<const double> betas,
                              std::span<const double> gs, RatioKind which,
                              unsigned threads) {
  if (betas.empty() || gs.empty())
    throw std::invalid_argument("ratio_map: grids must be non-empty");
  if (which == RatioKind::two_level && base.gamma != 1.0)
    throw std::invalid_argument("ratio_map: two-level ratio needs gamma = 1");

  std::vector<double> out(betas.size() * gs.size());
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const ChainParams p(base.L, gs[idx % gs.size()], base.gamma);
    const Thermal t(betas[idx / gs.size()]);
    const PartitionBreakdown b = z_exact(p, t);
    const LogScaledReal approx =
        which == RatioKind::ppa ? b.z_ppa : *b.z_two_level;
    out[idx] = std::exp(approx.log_magnitude() - b.z_exact.log_magnitude());
  });
  return out;
}

}  // namespace spinchain::partition
