#include "spinchain/fcs.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "spinchain/parallel.hpp"

namespace spinchain::fcs {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// Per-mode data entering the characteristic-function products.  w1(k) is
// decomposed as p I + v M(a) with M(a) = [[cos a, sin a], [sin a, -cos a]];
// conjugation by S_k turns M(a) into M(theta_k - a), of which only the
// diagonal +-c survives into the factors.
struct ModeTerm {
  double beps;  // beta * eps_k, >= 0
  double p;     // trace(w1) / 2
  double v;     // splitting of the traceless part
  double c;     // cos(theta_k - a); 0 when v = 0
  double mu, lambda;  // w2 eigenvalues
};

struct Context {
  std::vector<ModeTerm> plus, minus;
  double w01, w02, wp1, wp2;  // unpaired-mode diagonals (empty, occupied)
  double b0, bp;              // beta (g - 1), beta (g + 1)
  double offset;
};

ModeTerm make_mode_term(const QuadraticObservable& obs, double k, const ChainParams& params,
                        const Thermal& th) {
  const Eigen::Matrix2d w = obs.block_w1(k);
  ModeTerm t;
  t.beps = th.beta * dispersion(k, params);
  t.p = 0.5 * (w(0, 0) + w(1, 1));
  const double r = 0.5 * (w(0, 0) - w(1, 1));
  const double o = 0.5 * (w(0, 1) + w(1, 0));
  t.v = std::hypot(r, o);
  t.c = t.v > 0.0 ? std::cos(bogoliubov_angle(k, params) - std::atan2(o, r)) : 0.0;
  std::tie(t.mu, t.lambda) = obs.w2_eigs(k);
  return t;
}

Context make_context(const QuadraticObservable& obs, const ChainParams& params,
                     const Thermal& th) {
  const MomentumGrid grid = momentum_grids(params);
  Context ctx;
  ctx.plus.reserve(grid.k_plus.size());
  for (double k : grid.k_plus) ctx.plus.push_back(make_mode_term(obs, k, params, th));
  ctx.minus.reserve(grid.k_minus.size());
  for (double k : grid.k_minus) ctx.minus.push_back(make_mode_term(obs, k, params, th));
  std::tie(ctx.w01, ctx.w02) = obs.zero_mode;
  std::tie(ctx.wp1, ctx.wp2) = obs.pi_mode;
  ctx.b0 = th.beta * (params.g - 1.0);
  ctx.bp = th.beta * (params.g + 1.0);
  ctx.offset = obs.offset;
  return ctx;
}

// Paired-mode factor scaled by exp(-beta eps):
//   sigma11 e^{-beta eps} + sigma22 e^{beta eps} +- (e^{i theta mu} + e^{i theta lambda}).
// The scaled value stays O(1) for any beta eps, which keeps the running
// products finite at every chain length.
std::pair<Complex, Complex> mode_factor_pair(const ModeTerm& t, double theta) {
  const double q = std::exp(-t.beps);
  const Complex rot = std::exp(kI * (theta * t.p));
  const Complex base =
      rot * (std::cos(theta * t.v) * (1.0 + q * q) -
             kI * (t.c * std::sin(theta * t.v) * (1.0 - q * q)));
  const Complex wterm = q * (std::exp(kI * (theta * t.mu)) + std::exp(kI * (theta * t.lambda)));
  return {base + wterm, base - wterm};
}

// Unpaired-mode factor scaled by exp(-|b|): weight(empty) e^{i theta w1} +- weight(occ) e^{i theta w2}.
std::pair<Complex, Complex> unpaired_factor_pair(double b, double w1, double w2,
                                                 double theta) {
  const double a = std::abs(b);
  const Complex empty = std::exp(b - a) * std::exp(kI * (theta * w1));
  const Complex occ = std::exp(-b - a) * std::exp(kI * (theta * w2));
  return {empty + occ, empty - occ};
}

struct SectorProducts {
  ScaledComplex full;
  ScaledComplex even_minus_odd;
};

SectorProducts sector_products(const std::vector<ModeTerm>& modes, double theta) {
  SectorProducts out;
  double scale = 0.0;
  for (const ModeTerm& t : modes) {
    const auto [f, e] = mode_factor_pair(t, theta);
    out.full *= f;
    out.even_minus_odd *= e;
    scale += t.beps;
  }
  out.full.log_scale += scale;
  out.even_minus_odd.log_scale += scale;
  return out;
}

// (P+ + P-)(theta) * Z, up to the common normalization assemble(0) = Z.
ScaledComplex assemble(const Context& ctx, double theta) {
  const SectorProducts plus = sector_products(ctx.plus, theta);
  SectorProducts minus = sector_products(ctx.minus, theta);

  const auto [f0, e0] = unpaired_factor_pair(ctx.b0, ctx.w01, ctx.w02, theta);
  const auto [fp, ep] = unpaired_factor_pair(ctx.bp, ctx.wp1, ctx.wp2, theta);
  const double unpaired_scale = std::abs(ctx.b0) + std::abs(ctx.bp);
  minus.full *= f0;
  minus.full *= fp;
  minus.even_minus_odd *= e0;
  minus.even_minus_odd *= ep;
  minus.full.log_scale += unpaired_scale;
  minus.even_minus_odd.log_scale += unpaired_scale;

  ScaledComplex neg = minus.even_minus_odd;
  neg.value = -neg.value;
  const ScaledComplex terms[4] = {plus.full, plus.even_minus_odd, minus.full, neg};
  ScaledComplex sum = scaled_sum(terms);
  sum *= 0.5 * std::exp(kI * (theta * ctx.offset));
  return sum;
}

ScaledComplex assemble_ppa(const Context& ctx, double theta) {
  ScaledComplex a = sector_products(ctx.plus, theta).full;
  a *= std::exp(kI * (theta * ctx.offset));
  return a;
}

void require_builtin(const QuadraticObservable& obs) {
  if (obs.kind == BuiltinKind::custom)
    throw std::invalid_argument("char_fn_limit: no closed form for custom observables");
}

Complex limit_value(const QuadraticObservable& obs, const ChainParams& params, Limit limit,
                    double theta) {
  const int L = params.L;
  if (obs.kind == BuiltinKind::kinks) {
    if (limit == Limit::infinite_temperature) {
      const double c = std::pow(std::cos(theta / 2.0), L);
      const double s = std::pow(std::sin(theta / 2.0), L);
      const double sign = (L / 2) % 2 == 0 ? 1.0 : -1.0;
      return std::exp(kI * (L * theta / 2.0)) * (c + sign * s);
    }
    Complex prod{1.0, 0.0};
    for (double k : momentum_grids(params).k_plus) {
      const double c = std::cos(k - bogoliubov_angle(k, params));
      prod *= Complex{std::cos(theta), 0.0} - kI * (std::sin(theta) * c);
    }
    return std::exp(kI * (L * theta / 2.0)) * prod;
  }
  // magnetization
  if (limit == Limit::infinite_temperature) return std::pow(std::cos(theta), L);
  Complex prod{1.0, 0.0};
  for (double k : momentum_grids(params).k_plus) {
    const double c = std::cos(bogoliubov_angle(k, params));
    prod *= Complex{std::cos(2.0 * theta), 0.0} - kI * (std::sin(2.0 * theta) * c);
  }
  return prod;
}

std::vector<Complex> map_thetas(const std::vector<double>& thetas, unsigned threads,
                                const std::function<Complex(double)>& fn) {
  std::vector<Complex> values(thetas.size());
  parallel_for(thetas.size(), threads,
               [&](std::size_t i) { values[i] = fn(thetas[i]); });
  return values;
}

}  // namespace

QuadraticObservable kink_observable(const ChainParams& params) {
  QuadraticObservable obs;
  obs.name = "kinks";
  obs.kind = BuiltinKind::kinks;
  obs.block_w1 = [](double k) {
    Eigen::Matrix2d w;
    w << std::cos(k), std::sin(k), std::sin(k), -std::cos(k);
    return w;
  };
  obs.w2_eigs = [](double) { return std::pair<double, double>{0.0, 0.0}; };
  obs.zero_mode = {0.5, -0.5};
  obs.pi_mode = {-0.5, 0.5};
  obs.offset = params.L / 2.0;
  obs.support_step = 1;
  obs.support_min = 0;
  obs.support_max = params.L;
  return obs;
}

QuadraticObservable magnetization_observable(const ChainParams& params) {
  QuadraticObservable obs;
  obs.name = "magnetization";
  obs.kind = BuiltinKind::magnetization;
  obs.block_w1 = [](double) {
    Eigen::Matrix2d w;
    w << 2.0, 0.0, 0.0, -2.0;
    return w;
  };
  obs.w2_eigs = [](double) { return std::pair<double, double>{0.0, 0.0}; };
  obs.zero_mode = {1.0, -1.0};
  obs.pi_mode = {1.0, -1.0};
  obs.offset = 0.0;
  obs.support_step = 2;
  obs.support_min = -params.L;
  obs.support_max = params.L;
  return obs;
}

std::pair<Complex, Complex> sigma_entries(const QuadraticObservable& obs, double k,
                                          const ChainParams& params, double theta) {
  const ModeTerm t = make_mode_term(obs, k, params, Thermal(0.0));
  const Complex rot = std::exp(kI * (theta * t.p));
  const Complex s11 = rot * (std::cos(theta * t.v) + kI * (t.c * std::sin(theta * t.v)));
  const Complex s22 = rot * (std::cos(theta * t.v) - kI * (t.c * std::sin(theta * t.v)));
  return {s11, s22};
}

Complex char_fn_exact(const QuadraticObservable& obs, const ChainParams& params,
                      const Thermal& th, double theta) {
  const Context ctx = make_context(obs, params, th);
  return ratio(assemble(ctx, theta), assemble(ctx, 0.0));
}

Complex char_fn_ppa(const QuadraticObservable& obs, const ChainParams& params,
                    const Thermal& th, double theta) {
  const Context ctx = make_context(obs, params, th);
  return ratio(assemble_ppa(ctx, theta), assemble_ppa(ctx, 0.0));
}

Complex char_fn_limit(const QuadraticObservable& obs, const ChainParams& params, Limit limit,
                      double theta) {
  require_builtin(obs);
  return limit_value(obs, params, limit, theta);
}

std::vector<double> theta_grid(const QuadraticObservable& obs) {
  const int n = (obs.support_max - obs.support_min) / obs.support_step + 1;
  std::vector<double> thetas(n);
  for (int j = 0; j < n; ++j) thetas[j] = 2.0 * kPi * j / (double(n) * obs.support_step);
  return thetas;
}

CharacteristicSamples sample_exact(const QuadraticObservable& obs, const ChainParams& params,
                                   const Thermal& th, unsigned threads) {
  const Context ctx = make_context(obs, params, th);
  const ScaledComplex norm = assemble(ctx, 0.0);
  CharacteristicSamples s;
  s.thetas = theta_grid(obs);
  s.values = map_thetas(s.thetas, threads,
                        [&](double t) { return ratio(assemble(ctx, t), norm); });
  return s;
}

CharacteristicSamples sample_ppa(const QuadraticObservable& obs, const ChainParams& params,
                                 const Thermal& th, unsigned threads) {
  const Context ctx = make_context(obs, params, th);
  const ScaledComplex norm = assemble_ppa(ctx, 0.0);
  CharacteristicSamples s;
  s.thetas = theta_grid(obs);
  s.values = map_thetas(s.thetas, threads,
                        [&](double t) { return ratio(assemble_ppa(ctx, t), norm); });
  return s;
}

CharacteristicSamples sample_limit(const QuadraticObservable& obs, const ChainParams& params,
                                   Limit limit) {
  require_builtin(obs);
  CharacteristicSamples s;
  s.thetas = theta_grid(obs);
  s.values.reserve(s.thetas.size());
  for (double t : s.thetas) s.values.push_back(limit_value(obs, params, limit, t));
  return s;
}

double Distribution::sum() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

double Distribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) m += probs[i] * support[i];
  return m;
}

Distribution invert(const QuadraticObservable& obs, const CharacteristicSamples& samples) {
  const std::vector<double> expected = theta_grid(obs);
  const std::size_t n = expected.size();
  if (samples.thetas.size() != n || samples.values.size() != n)
    throw std::invalid_argument("invert: sample grid size does not match the support lattice");
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(samples.thetas[j] - expected[j]) > 1e-12 * (1.0 + std::abs(expected[j])))
      throw std::invalid_argument("invert: thetas are not the exact inversion grid");

  Distribution dist;
  dist.support.resize(n);
  dist.probs.resize(n);
  double max_imag = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const int omega = obs.support_min + static_cast<int>(t) * obs.support_step;
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      acc += samples.values[j] * std::exp(-kI * (samples.thetas[j] * omega));
    acc /= static_cast<double>(n);
    max_imag = std::max(max_imag, std::abs(acc.imag()));
    dist.support[t] = omega;
    dist.probs[t] = acc.real();
  }
  if (max_imag > 1e-10)
    throw std::runtime_error("invert: imaginary residue above 1e-10; characteristic function is inconsistent");

  for (double& p : dist.probs) {
    if (p < -1e-12)
      throw std::runtime_error("invert: probability below -1e-12; characteristic function is inconsistent");
    if (p < 0.0) p = 0.0;
  }
  const double total = dist.sum();
  dist.norm_residual = std::abs(total - 1.0);
  if (total > 0.0)
    for (double& p : dist.probs) p /= total;
  return dist;
}

CumulantSet cumulants(const Distribution& dist, int m_max) {
  if (m_max < 1 || m_max > 6)
    throw std::invalid_argument("cumulants: m_max must be within 1..6");
  const double mean = dist.mean();
  double m[7] = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};  // central moments
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    const double d = dist.support[i] - mean;
    double pw = dist.probs[i] * d;
    for (int r = 1; r <= m_max; ++r) {
      if (r >= 2) m[r] += pw;  // m[1] stays 0 by construction
      pw *= d;
    }
  }
  CumulantSet out;
  out.kappa.resize(m_max);
  for (int r = 1; r <= m_max; ++r) {
    double k = 0.0;
    switch (r) {
      case 1: k = mean; break;
      case 2: k = m[2]; break;
      case 3: k = m[3]; break;
      case 4: k = m[4] - 3.0 * m[2] * m[2]; break;
      case 5: k = m[5] - 10.0 * m[3] * m[2]; break;
      case 6:
        k = m[6] - 15.0 * m[4] * m[2] - 10.0 * m[3] * m[3] +
            30.0 * m[2] * m[2] * m[2];
        break;
    }
    out.kappa[r - 1] = k;
  }
  return out;
}

Distribution coarse_grained_ppa(const Distribution& ppa_dist) {
  if (ppa_dist.support.size() < 2 || ppa_dist.support[1] - ppa_dist.support[0] != 1)
    throw std::invalid_argument("coarse_grained_ppa: needs a unit-step integer support");
  const std::size_t n = ppa_dist.support.size();
  Distribution out;
  out.support = ppa_dist.support;
  out.probs.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (ppa_dist.support[i] % 2 != 0) continue;
    double p = ppa_dist.probs[i];
    if (i > 0) p += 0.5 * ppa_dist.probs[i - 1];
    if (i + 1 < n) p += 0.5 * ppa_dist.probs[i + 1];
    out.probs[i] = p;
  }
  const double total = out.sum();
  out.norm_residual = std::abs(total - 1.0);
  if (total > 0.0)
    for (double& p : out.probs) p /= total;
  return out;
}

Distribution distribution_exact(const QuadraticObservable& obs, const ChainParams& params,
                                const Thermal& th, unsigned threads) {
  return invert(obs, sample_exact(obs, params, th, threads));
}

Distribution distribution_ppa(const QuadraticObservable& obs, const ChainParams& params,
                              const Thermal& th, unsigned threads) {
  return invert(obs, sample_ppa(obs, params, th, threads));
}

Distribution distribution_limit(const QuadraticObservable& obs, const ChainParams& params,
                                Limit limit) {
  return invert(obs, sample_limit(obs, params, limit));
}

}  // namespace spinchain::fcs
