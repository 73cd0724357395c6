#include "spinchain/verify.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <ostream>
#include <random>
#include <sstream>

#include "spinchain/oracle.hpp"
#include "spinchain/parity_algebra.hpp"
#include "spinchain/partition.hpp"

namespace spinchain::verify {

namespace {

std::string format_point(int L, double gamma, double g, double beta) {
  std::ostringstream os;
  os << "L=" << L << " gamma=" << gamma << " g=" << g << " beta=" << beta;
  return os.str();
}

double rel_from_logs(const LogScaledReal& a, const LogScaledReal& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  if (a.sign() != b.sign()) return std::numeric_limits<double>::infinity();
  return std::abs(std::expm1(a.log_magnitude() - b.log_magnitude()));
}

LogScaledReal maybe_flipped_z(const ChainParams& p, const Thermal& th, bool flip) {
  const partition::PartitionBreakdown b = partition::z_exact(p, th);
  if (!flip) return b.z_exact;
  const LogScaledReal terms[] = {b.z_f_plus, b.z_b_plus, b.z_f_minus, b.z_b_minus};
  const LogScaledReal half = LogScaledReal::from_value(0.5);
  return half * log_sum_signed(terms).value;
}

// Sup-norm between two integer-supported distributions, missing entries = 0.
double sup_norm_diff(const fcs::Distribution& a, const fcs::Distribution& b) {
  double worst = 0.0;
  auto scan = [&](const fcs::Distribution& x, const fcs::Distribution& y) {
    for (std::size_t i = 0; i < x.support.size(); ++i) {
      double py = 0.0;
      for (std::size_t j = 0; j < y.support.size(); ++j)
        if (y.support[j] == x.support[i]) {
          py = y.probs[j];
          break;
        }
      worst = std::max(worst, std::abs(x.probs[i] - py));
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

Eigen::MatrixXcd random_block_part(std::mt19937_64& rng, int dim, bool even) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int h = dim / 2;
  Eigen::MatrixXcd part = Eigen::MatrixXcd::Zero(dim, dim);
  const int base = even ? 0 : h;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j)
      part(base + i, base + j) = std::complex<double>(u(rng), u(rng));
  return part;
}

std::vector<parity::GradedBlock> random_blocks(std::mt19937_64& rng, int n) {
  std::vector<parity::GradedBlock> blocks;
  std::uniform_int_distribution<int> dim_pick(0, 1);
  blocks.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int dim = dim_pick(rng) ? 4 : 2;
    blocks.push_back(parity::GradedBlock::from_parts(random_block_part(rng, dim, true),
                                                     random_block_part(rng, dim, false)));
  }
  return blocks;
}

}  // namespace

Deviation check_partition_vs_oracle(std::span<const int> Ls, std::span<const double> gammas,
                                    std::span<const double> gs, std::span<const double> betas,
                                    bool flip_zb_minus) {
  Deviation dev;
  for (int L : Ls)
    for (double gamma : gammas)
      for (double g : gs) {
        const ChainParams p(L, g, gamma);
        const Eigen::VectorXd evals = oracle::eigenvalues(oracle::build_hamiltonian(p).matrix);
        for (double beta : betas) {
          const LogScaledReal z = maybe_flipped_z(p, Thermal(beta), flip_zb_minus);
          const LogScaledReal z_ed = oracle::log_trace_exp(evals, beta);
          dev.update(rel_from_logs(z, z_ed), format_point(L, gamma, g, beta));
        }
      }
  return dev;
}

Deviation check_sectors_vs_oracle(std::span<const int> Ls, std::span<const double> gammas,
                                  std::span<const double> gs, std::span<const double> betas,
                                  bool flip_zb_minus) {
  Deviation dev;
  for (int L : Ls)
    for (double gamma : gammas)
      for (double g : gs) {
        const ChainParams p(L, g, gamma);
        const auto [even, odd] = oracle::parity_blocks(oracle::build_hamiltonian(p));
        const Eigen::VectorXd ev_even = oracle::eigenvalues(even);
        const Eigen::VectorXd ev_odd = oracle::eigenvalues(odd);
        for (double beta : betas) {
          const Thermal th(beta);
          partition::PartitionBreakdown b = partition::z_exact(p, th);
          if (flip_zb_minus) {
            const LogScaledReal terms[] = {b.z_f_minus, b.z_b_minus};
            b.z_minus = LogScaledReal::from_value(0.5) * log_sum_signed(terms).value;
          }
          const std::string at = format_point(L, gamma, g, beta);
          dev.update(rel_from_logs(b.z_plus, oracle::log_trace_exp(ev_even, beta)), at);
          dev.update(rel_from_logs(b.z_minus, oracle::log_trace_exp(ev_odd, beta)), at);
        }
      }
  return dev;
}

Deviation check_ground_energies(std::span<const int> Ls, std::span<const double> gammas,
                                std::span<const double> gs) {
  Deviation dev;
  for (int L : Ls)
    for (double gamma : gammas)
      for (double g : gs) {
        const ChainParams p(L, g, gamma);
        const GroundEnergies e = ground_energies(p);
        const auto [even, odd] = oracle::parity_blocks(oracle::build_hamiltonian(p));
        const double e_plus = oracle::eigenvalues(even).minCoeff();
        const double e_minus = oracle::eigenvalues(odd).minCoeff();
        const std::string at = format_point(L, gamma, g, 0.0);
        dev.update(std::abs(e.e_plus - e_plus) / std::abs(e_plus), at);
        dev.update(std::abs(e.e_minus - e_minus) / std::abs(e_minus), at);
      }
  return dev;
}

Deviation check_fcs_vs_oracle(fcs::BuiltinKind kind, std::span<const int> Ls,
                              std::span<const double> gs, std::span<const double> betas) {
  Deviation dev;
  for (int L : Ls) {
    const ChainParams base(L, 0.0, 1.0);
    const fcs::QuadraticObservable obs = kind == fcs::BuiltinKind::kinks
                                             ? fcs::kink_observable(base)
                                             : fcs::magnetization_observable(base);
    const oracle::DenseOperator w = kind == fcs::BuiltinKind::kinks
                                        ? oracle::build_kink_operator(L)
                                        : oracle::build_magnetization_operator(L);
    for (double g : gs) {
      const ChainParams p(L, g, 1.0);
      const oracle::FcsPlan plan(w, oracle::build_hamiltonian(p));
      for (double beta : betas) {
        const fcs::Distribution analytic = fcs::distribution_exact(obs, p, Thermal(beta), 1);
        const fcs::Distribution reference = plan.at_beta(beta);
        dev.update(sup_norm_diff(analytic, reference), format_point(L, 1.0, g, beta));
      }
    }
  }
  return dev;
}

Deviation check_kink_parity(std::span<const int> Ls, std::span<const double> gs,
                            std::span<const double> betas) {
  Deviation dev;
  for (int L : Ls) {
    const fcs::QuadraticObservable obs = fcs::kink_observable(ChainParams(L, 0.0, 1.0));
    for (double g : gs)
      for (double beta : betas) {
        const ChainParams p(L, g, 1.0);
        const fcs::Distribution d = fcs::distribution_exact(obs, p, Thermal(beta), 1);
        for (std::size_t i = 0; i < d.support.size(); ++i)
          if (d.support[i] % 2 != 0)
            dev.update(d.probs[i], format_point(L, 1.0, g, beta));
      }
  }
  return dev;
}

double ppa_max_odd_mass(int L, double g, double beta) {
  const ChainParams p(L, g, 1.0);
  const fcs::Distribution d =
      fcs::distribution_ppa(fcs::kink_observable(p), p, Thermal(beta), 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < d.support.size(); ++i)
    if (d.support[i] % 2 != 0) worst = std::max(worst, d.probs[i]);
  return worst;
}

ParityAlgebraDeviations check_parity_algebra(int instances, std::uint64_t seed) {
  using parity::GradedBlock;
  using parity::Sector;
  ParityAlgebraDeviations out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_pick(1, 4);

  for (int inst = 0; inst < instances; ++inst) {
    const int n = n_pick(rng);
    const std::vector<GradedBlock> a = random_blocks(rng, n);
    std::ostringstream os;
    os << "instance " << inst << " (n=" << n << ")";
    const std::string at = os.str();

    // Trace identities against the dense construction.
    for (auto sector : {Sector::P, Sector::N}) {
      const std::complex<double> closed = sector == Sector::P
                                              ? parity::restricted_trace_P(a)
                                              : parity::restricted_trace_N(a);
      const std::complex<double> dense = parity::dense_restricted(a, sector).trace();
      out.traces.update(std::abs(closed - dense) / std::max(1.0, std::abs(dense)), at);
    }

    // Product identity: P(⊗A) P(⊗B) = P(⊗ A B), blocks multiplied per mode.
    if (n <= 3) {
      std::vector<GradedBlock> b, ab;
      for (const auto& block : a) {
        b.push_back(GradedBlock::from_parts(random_block_part(rng, block.dim(), true),
                                            random_block_part(rng, block.dim(), false)));
        ab.push_back(GradedBlock::from_full(block.full() * b.back().full()));
      }
      for (auto sector : {Sector::P, Sector::N}) {
        const Eigen::MatrixXcd lhs =
            parity::dense_restricted(a, sector) * parity::dense_restricted(b, sector);
        const Eigen::MatrixXcd rhs = parity::dense_restricted(ab, sector);
        out.products.update((lhs - rhs).cwiseAbs().maxCoeff(), at);
      }

      // Exponential identity: exp(P(⊗A)) = P(⊗ exp A) for parity-preserving A.
      std::vector<GradedBlock> expa;
      for (const auto& block : a)
        expa.push_back(GradedBlock::from_full(block.full().exp().eval()));
      for (auto sector : {Sector::P, Sector::N}) {
        const Eigen::MatrixXcd lhs = parity::dense_restricted(a, sector).exp();
        const Eigen::MatrixXcd rhs = parity::dense_restricted(expa, sector);
        out.exponentials.update((lhs - rhs).cwiseAbs().maxCoeff(), at);
      }
    }
  }
  return out;
}

std::vector<CheckResult> run_all(const Options& opts, std::ostream& log) {
  std::vector<int> ls;
  for (int L = 2; L <= opts.l_max; L += 2) ls.push_back(L);
  std::vector<int> ls_fcs;
  for (int L = 2; L <= std::min(opts.l_max, 10); L += 2) ls_fcs.push_back(L);
  const std::vector<double> gammas = {0.0, 0.5, 1.0};
  const std::vector<double> gs = {0.0, 0.5, 1.0, 1.5, 2.0};
  const std::vector<double> betas = {0.0, 0.1, 1.0, 5.0};
  const std::vector<double> gs_fcs = {0.5, 1.0, 2.0};
  const std::vector<double> betas_fcs = {0.1, 1.0, 5.0};

  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, const Deviation& dev, double tol) {
    results.push_back({name, dev.max, tol, dev.max <= tol, dev.where});
  };

  add("partition.z_exact",
      check_partition_vs_oracle(ls, gammas, gs, betas, opts.flip_zb_minus), 1e-9);
  add("partition.sectors",
      check_sectors_vs_oracle(ls, gammas, gs, betas, opts.flip_zb_minus), 1e-9);
  add("model.ground_energies", check_ground_energies(ls, gammas, gs), 1e-10);
  add("fcs.kinks", check_fcs_vs_oracle(fcs::BuiltinKind::kinks, ls_fcs, gs_fcs, betas_fcs),
      1e-8);
  add("fcs.magnetization",
      check_fcs_vs_oracle(fcs::BuiltinKind::magnetization, ls_fcs, gs_fcs, betas_fcs), 1e-8);
  add("fcs.kink_parity", check_kink_parity(ls_fcs, gs_fcs, betas_fcs), 1e-10);

  const ParityAlgebraDeviations pa = check_parity_algebra(200, opts.seed);
  add("parity_algebra.traces", pa.traces, 1e-10);
  add("parity_algebra.products", pa.products, 1e-10);
  add("parity_algebra.exponentials", pa.exponentials, 1e-8);

  for (const CheckResult& r : results) {
    log << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  max dev " << r.max_dev
        << "  (tol " << r.tolerance << ")";
    if (!r.worst_case.empty()) log << "  worst at " << r.worst_case;
    log << "\n";
  }
  return results;
}

}  // namespace spinchain::verify
