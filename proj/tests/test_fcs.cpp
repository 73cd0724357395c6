#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "spinchain/fcs.hpp"
#include "spinchain/oracle.hpp"

using namespace spinchain;
using fcs::Complex;

namespace {

constexpr double kPi = std::numbers::pi;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Characteristic function of an integer-supported distribution.
Complex char_of(const fcs::Distribution& d, double theta) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < d.support.size(); ++i)
    acc += d.probs[i] * std::exp(Complex(0.0, theta * d.support[i]));
  return acc;
}

double sup_diff(const fcs::Distribution& a, const fcs::Distribution& b) {
  double worst = 0.0;
  auto at = [](const fcs::Distribution& d, int n) {
    for (std::size_t i = 0; i < d.support.size(); ++i)
      if (d.support[i] == n) return d.probs[i];
    return 0.0;
  };
  for (int n : a.support) worst = std::max(worst, std::abs(at(a, n) - at(b, n)));
  for (int n : b.support) worst = std::max(worst, std::abs(at(a, n) - at(b, n)));
  return worst;
}

fcs::Distribution delta_at(int n0, int lo, int hi, int step) {
  fcs::Distribution d;
  for (int n = lo; n <= hi; n += step) {
    d.support.push_back(n);
    d.probs.push_back(n == n0 ? 1.0 : 0.0);
  }
  return d;
}

}  // namespace

TEST_CASE("built-in observable definitions") {
  const ChainParams p(8, 0.7, 1.0);
  const auto kinks = fcs::kink_observable(p);
  CHECK(kinks.offset == doctest::Approx(4.0));
  CHECK(kinks.support_step == 1);
  CHECK(kinks.support_min == 0);
  CHECK(kinks.support_max == 8);
  // w1(k) squares to the identity: eigenvalues are +-1 for every k.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uk(0.0, kPi);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Matrix2d w = kinks.block_w1(uk(rng));
    CHECK((w * w - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(w.trace()) < 1e-14);
  }
  CHECK(kinks.zero_mode.first == doctest::Approx(0.5));
  CHECK(kinks.zero_mode.second == doctest::Approx(-0.5));
  CHECK(kinks.pi_mode.first == doctest::Approx(-0.5));

  const auto mag = fcs::magnetization_observable(p);
  CHECK(mag.offset == 0.0);
  CHECK(mag.support_step == 2);
  CHECK(mag.support_min == -8);
  CHECK(mag.support_max == 8);
  const Eigen::Matrix2d w = mag.block_w1(1.234);
  CHECK(w(0, 0) == doctest::Approx(2.0));
  CHECK(w(1, 1) == doctest::Approx(-2.0));
  CHECK(w(0, 1) == 0.0);
}

TEST_CASE("sigma entries") {
  const ChainParams p(8, 1.3, 1.0);
  const auto kinks = fcs::kink_observable(p);
  const auto mag = fcs::magnetization_observable(p);

  auto [a0, b0] = fcs::sigma_entries(kinks, 0.9, p, 0.0);
  CHECK(std::abs(a0 - 1.0) < 1e-14);
  CHECK(std::abs(b0 - 1.0) < 1e-14);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uk(0.05, kPi - 0.05), ut(-kPi, kPi), ug(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double k = uk(rng), theta = ut(rng);
    const ChainParams q(8, ug(rng), 1.0);
    const double bogo = bogoliubov_angle(k, q);
    const auto [s11, s22] = fcs::sigma_entries(kinks, k, q, theta);
    const Complex expect =
        Complex(std::cos(theta), 0.0) +
        Complex(0.0, std::sin(theta) * std::cos(k - bogo));
    CHECK(std::abs(s11 - expect) < 1e-13);
    CHECK(std::abs(s22 - std::conj(expect)) < 1e-13);

    // Trace is invariant under the S_k conjugation: s11 + s22 = tr exp(i theta w1).
    for (const auto& obs : {kinks, mag}) {
      const auto [x, y] = fcs::sigma_entries(obs, k, q, theta);
      const Eigen::Matrix2cd e =
          (Complex(0.0, theta) * obs.block_w1(k).cast<Complex>()).exp();
      CHECK(std::abs(x + y - e.trace()) < 1e-12);
    }

    const auto [m11, m22] = fcs::sigma_entries(mag, k, q, theta);
    const Complex mexpect = Complex(std::cos(2 * theta), 0.0) +
                            Complex(0.0, std::sin(2 * theta) * std::cos(bogo));
    CHECK(std::abs(m11 - mexpect) < 1e-13);
  }
}

TEST_CASE("characteristic function basics") {
  const ChainParams p(8, 0.8, 1.0);
  const Thermal th(1.1);
  const auto kinks = fcs::kink_observable(p);

  CHECK(std::abs(fcs::char_fn_exact(kinks, p, th, 0.0) - 1.0) < 1e-12);
  CHECK(std::abs(fcs::char_fn_ppa(kinks, p, th, 0.0) - 1.0) < 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.0, 2 * kPi);
  for (int i = 0; i < 40; ++i) {
    const double theta = ut(rng);
    const Complex v = fcs::char_fn_exact(kinks, p, th, theta);
    CHECK(std::abs(v) <= 1.0 + 1e-10);
    // Real distribution: P(-theta) = conj P(theta).
    CHECK(std::abs(fcs::char_fn_exact(kinks, p, th, -theta) - std::conj(v)) < 1e-12);
  }
}

TEST_CASE("exact characteristic function matches the dense oracle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ut(-kPi, kPi);
  for (int L : {4, 8}) {
    const auto n_op = oracle::build_kink_operator(L);
    const auto m_op = oracle::build_magnetization_operator(L);
    for (double g : {0.5, 1.5}) {
      const ChainParams p(L, g, 1.0);
      const auto h = oracle::build_hamiltonian(p);
      for (double beta : {0.5, 2.0}) {
        const auto kink_ref = oracle::thermal_fcs(n_op, h, beta);
        const auto mag_ref = oracle::thermal_fcs(m_op, h, beta);
        const auto kinks = fcs::kink_observable(p);
        const auto mag = fcs::magnetization_observable(p);
        for (int i = 0; i < 32; ++i) {
          const double theta = ut(rng);
          CHECK(std::abs(fcs::char_fn_exact(kinks, p, Thermal(beta), theta) -
                         char_of(kink_ref, theta)) <= 1e-8);
          CHECK(std::abs(fcs::char_fn_exact(mag, p, Thermal(beta), theta) -
                         char_of(mag_ref, theta)) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("deep ferromagnet freezes into the kink vacuum") {
  const ChainParams p(8, 0.0, 1.0);
  const auto kinks = fcs::kink_observable(p);
  for (double theta : {0.4, 1.0, 2.2, 3.0}) {
    CHECK(std::abs(fcs::char_fn_exact(kinks, p, Thermal(50.0), theta) - 1.0) <= 1e-6);
  }
}

TEST_CASE("thermal path reproduces the closed-form limits") {
  const ChainParams p(8, 1.2, 1.0);
  const auto kinks = fcs::kink_observable(p);
  const auto mag = fcs::magnetization_observable(p);
  for (double theta : {0.3, 1.1, 2.9}) {
    // beta = 0 thermal values equal the infinite-temperature closed forms.
    CHECK(std::abs(fcs::char_fn_exact(kinks, p, Thermal(0.0), theta) -
                   fcs::char_fn_limit(kinks, p, fcs::Limit::infinite_temperature, theta)) <
          1e-12);
    CHECK(std::abs(fcs::char_fn_exact(mag, p, Thermal(0.0), theta) -
                   fcs::char_fn_limit(mag, p, fcs::Limit::infinite_temperature, theta)) <
          1e-12);
    // Large beta approaches the ground-state closed forms.
    CHECK(std::abs(fcs::char_fn_exact(kinks, p, Thermal(40.0), theta) -
                   fcs::char_fn_limit(kinks, p, fcs::Limit::ground_state, theta)) < 1e-8);
    CHECK(std::abs(fcs::char_fn_exact(mag, p, Thermal(40.0), theta) -
                   fcs::char_fn_limit(mag, p, fcs::Limit::ground_state, theta)) < 1e-8);
  }
  // At beta = 0 the PPA coincides with the exact result for magnetization;
  // for kinks it lacks the even-n restriction, so only the cumulants agree.
  for (double theta : {0.3, 1.1, 2.9}) {
    CHECK(std::abs(fcs::char_fn_ppa(mag, p, Thermal(0.0), theta) -
                   fcs::char_fn_exact(mag, p, Thermal(0.0), theta)) < 1e-12);
  }
  const auto k_ppa = fcs::cumulants(fcs::distribution_ppa(kinks, p, Thermal(0.0)), 4);
  CHECK(k_ppa(1) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(k_ppa(2) == doctest::Approx(2.0).epsilon(1e-9));

  CHECK_THROWS_AS(
      fcs::char_fn_limit(fcs::QuadraticObservable{}, p, fcs::Limit::ground_state, 0.1),
      std::invalid_argument);
}

TEST_CASE("ground-state kink distribution at g = 0 is a delta at zero") {
  const ChainParams p(10, 0.0, 1.0);
  const auto d =
      fcs::distribution_limit(fcs::kink_observable(p), p, fcs::Limit::ground_state);
  CHECK(d.probs[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < d.probs.size(); ++i) CHECK(std::abs(d.probs[i]) <= 1e-12);
}

TEST_CASE("theta grids") {
  const ChainParams p(6, 1.0, 1.0);
  const auto tk = fcs::theta_grid(fcs::kink_observable(p));
  REQUIRE(tk.size() == 7);
  CHECK(tk[1] == doctest::Approx(2 * kPi / 7));
  CHECK(tk.back() < 2 * kPi);
  const auto tm = fcs::theta_grid(fcs::magnetization_observable(p));
  REQUIRE(tm.size() == 7);
  CHECK(tm[1] == doctest::Approx(kPi / 7));
  CHECK(tm.back() < kPi);
}

TEST_CASE("inversion recovers known distributions") {
  const ChainParams p(8, 1.0, 1.0);
  const auto kinks = fcs::kink_observable(p);

  // Constant characteristic function: a delta at n = 0.
  fcs::CharacteristicSamples flat;
  flat.thetas = fcs::theta_grid(kinks);
  flat.values.assign(flat.thetas.size(), Complex{1.0, 0.0});
  CHECK(sup_diff(fcs::invert(kinks, flat), delta_at(0, 0, 8, 1)) < 1e-12);

  // cos^L theta inverts to the +-1 binomial on even support.
  const auto mag = fcs::magnetization_observable(p);
  const auto mag_dist = fcs::distribution_limit(mag, p, fcs::Limit::infinite_temperature);
  for (std::size_t i = 0; i < mag_dist.support.size(); ++i) {
    const int m = mag_dist.support[i];
    CHECK(mag_dist.probs[i] ==
          doctest::Approx(binom(8, (m + 8) / 2) / 256.0).epsilon(1e-10));
  }

  // Infinite-temperature kinks: even binomials with doubled weight.
  const auto kink_dist = fcs::distribution_limit(kinks, p, fcs::Limit::infinite_temperature);
  for (std::size_t i = 0; i < kink_dist.support.size(); ++i) {
    const int n = kink_dist.support[i];
    const double expect = n % 2 == 0 ? binom(8, n) / 128.0 : 0.0;
    CHECK(std::abs(kink_dist.probs[i] - expect) <= 1e-12);
  }

  // Aliasing guard: a shifted grid is rejected.
  fcs::CharacteristicSamples shifted = flat;
  for (double& t : shifted.thetas) t += 1e-6;
  CHECK_THROWS_AS(fcs::invert(kinks, shifted), std::invalid_argument);
  fcs::CharacteristicSamples short_grid = flat;
  short_grid.thetas.pop_back();
  short_grid.values.pop_back();
  CHECK_THROWS_AS(fcs::invert(kinks, short_grid), std::invalid_argument);
}

TEST_CASE("thermal distributions match the dense oracle") {
  for (int L : {2, 4, 6, 8}) {
    const auto n_op = oracle::build_kink_operator(L);
    const auto m_op = oracle::build_magnetization_operator(L);
    for (double g : {0.5, 1.0, 2.0}) {
      const ChainParams p(L, g, 1.0);
      const auto h = oracle::build_hamiltonian(p);
      const oracle::FcsPlan kink_plan(n_op, h);
      const oracle::FcsPlan mag_plan(m_op, h);
      for (double beta : {0.1, 1.0, 5.0}) {
        const auto kd = fcs::distribution_exact(fcs::kink_observable(p), p, Thermal(beta));
        CHECK(sup_diff(kd, kink_plan.at_beta(beta)) <= 1e-8);
        const auto md =
            fcs::distribution_exact(fcs::magnetization_observable(p), p, Thermal(beta));
        CHECK(sup_diff(md, mag_plan.at_beta(beta)) <= 1e-8);
        CHECK(kd.sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(md.sum() == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("cumulants") {
  // Degenerate distribution.
  const auto kd = fcs::cumulants(delta_at(3, 0, 8, 1), 4);
  CHECK(kd(1) == doctest::Approx(3.0));
  CHECK(kd(2) == doctest::Approx(0.0));
  CHECK(kd(3) == doctest::Approx(0.0));
  CHECK(kd(4) == doctest::Approx(0.0));

  // Infinite-temperature kinks: (L/2, L/4, 0, -L/8).
  const ChainParams p(8, 0.4, 1.0);
  const auto kinks = fcs::kink_observable(p);
  const auto kt = fcs::cumulants(
      fcs::distribution_limit(kinks, p, fcs::Limit::infinite_temperature), 4);
  CHECK(std::abs(kt(1) - 4.0) <= 1e-9);
  CHECK(std::abs(kt(2) - 2.0) <= 1e-9);
  CHECK(std::abs(kt(3)) <= 1e-9);
  CHECK(std::abs(kt(4) + 1.0) <= 1e-9);

  // Infinite-temperature magnetization: variance L, not L/4.
  const auto mag = fcs::magnetization_observable(p);
  const auto mt =
      fcs::cumulants(fcs::distribution_limit(mag, p, fcs::Limit::infinite_temperature), 4);
  CHECK(std::abs(mt(1)) <= 1e-9);
  CHECK(std::abs(mt(2) - 8.0) <= 1e-9);

  // Ground-state magnetization variance: the fidelity-susceptibility form.
  for (int L : {8, 12}) {
    for (double g : {0.25, 0.5, 0.9, 1.0, 2.0}) {
      const ChainParams q(L, g, 1.0);
      const auto d =
          fcs::distribution_limit(fcs::magnetization_observable(q), q, fcs::Limit::ground_state);
      const double expect =
          L * (1.0 + std::pow(g, L - 2)) / (1.0 + std::pow(g, L));
      CHECK(fcs::cumulants(d, 2)(2) == doctest::Approx(expect).epsilon(1e-9));
    }
  }

  CHECK_THROWS_AS(fcs::cumulants(delta_at(0, 0, 4, 1), 7), std::invalid_argument);
  CHECK_THROWS_AS(fcs::cumulants(delta_at(0, 0, 4, 1), 0), std::invalid_argument);
}

TEST_CASE("moment route agrees with the derivative of log P~ at L = 8") {
  const ChainParams p(8, 0.7, 1.0);
  const Thermal th(0.8);
  const auto kinks = fcs::kink_observable(p);
  const auto from_dist = fcs::cumulants(fcs::distribution_exact(kinks, p, th), 4);

  // Central finite differences of f(theta) = log P~(theta) at 0.
  const double h = 0.02;
  auto f = [&](double theta) {
    return std::log(fcs::char_fn_exact(kinks, p, th, theta));
  };
  const Complex f0 = f(0.0), f1 = f(h), fm1 = f(-h), f2 = f(2 * h), fm2 = f(-2 * h);
  const Complex i{0.0, 1.0};
  const Complex k1 = (f1 - fm1) / (2 * h) / i;
  const Complex k2 = (f1 - 2.0 * f0 + fm1) / (h * h) / (i * i);
  const Complex k3 = (f2 - 2.0 * f1 + 2.0 * fm1 - fm2) / (2 * h * h * h) / (i * i * i);
  const Complex k4 =
      (f2 - 4.0 * f1 + 6.0 * f0 - 4.0 * fm1 + fm2) / (h * h * h * h) / (i * i * i * i);
  CHECK(std::abs(k1.real() - from_dist(1)) <= 5e-3 * std::max(1.0, std::abs(from_dist(1))));
  CHECK(std::abs(k2.real() - from_dist(2)) <= 5e-3 * std::max(1.0, std::abs(from_dist(2))));
  CHECK(std::abs(k3.real() - from_dist(3)) <= 5e-2 * std::max(1.0, std::abs(from_dist(3))));
  CHECK(std::abs(k4.real() - from_dist(4)) <= 5e-2 * std::max(1.0, std::abs(from_dist(4))));
}

TEST_CASE("coarse-grained PPA") {
  // A delta at an even point is untouched.
  const auto cg = fcs::coarse_grained_ppa(delta_at(4, 0, 8, 1));
  CHECK(sup_diff(cg, delta_at(4, 0, 8, 1)) < 1e-14);

  // Step-2 input is rejected.
  CHECK_THROWS_AS(fcs::coarse_grained_ppa(delta_at(0, -4, 4, 2)), std::invalid_argument);

  // Symmetric regime: coarse-grained PPA tracks the exact distribution.
  const ChainParams p(50, 1.5, 1.0);
  const Thermal th(1.0);
  const auto kinks = fcs::kink_observable(p);
  const auto exact = fcs::distribution_exact(kinks, p, th);
  const auto cg_ppa = fcs::coarse_grained_ppa(fcs::distribution_ppa(kinks, p, th));
  CHECK(sup_diff(exact, cg_ppa) <= 5e-3);
}

TEST_CASE("kink parity: exact even-only, PPA violates") {
  for (double g : {0.5, 1.0, 2.0}) {
    for (double beta : {0.1, 1.0, 5.0}) {
      const ChainParams p(10, g, 1.0);
      const auto d = fcs::distribution_exact(fcs::kink_observable(p), p, Thermal(beta));
      for (std::size_t i = 0; i < d.support.size(); ++i)
        if (d.support[i] % 2 != 0) CHECK(d.probs[i] <= 1e-10);
    }
  }
  const ChainParams p(12, 0.5, 1.0);
  const auto ppa = fcs::distribution_ppa(fcs::kink_observable(p), p, Thermal(0.5));
  double odd_mass = 0.0;
  for (std::size_t i = 0; i < ppa.support.size(); ++i)
    if (ppa.support[i] % 2 != 0) odd_mass = std::max(odd_mass, ppa.probs[i]);
  CHECK(odd_mass > 1e-4);
}

TEST_CASE("sub/super-Poissonian crossover of the kink statistics") {
  const std::vector<double> betas = {0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0};
  auto excess = [&](double g, double beta) {
    const ChainParams p(12, g, 1.0);
    const auto k =
        fcs::cumulants(fcs::distribution_exact(fcs::kink_observable(p), p, Thermal(beta)), 2);
    return k(2) - k(1);
  };
  bool saw_negative = false, saw_positive = false;
  for (double beta : betas) {
    const double e = excess(0.5, beta);
    saw_negative |= e < 0.0;
    saw_positive |= e > 0.0;
  }
  CHECK(saw_negative);
  CHECK(saw_positive);
  for (double beta : betas) CHECK(excess(2.0, beta) < 0.0);  // sub-Poissonian throughout
}

TEST_CASE("ferromagnetic magnetization stays super-Poissonian") {
  for (double beta : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const ChainParams p(12, 0.5, 1.0);
    const auto k = fcs::cumulants(
        fcs::distribution_exact(fcs::magnetization_observable(p), p, Thermal(beta)), 2);
    CHECK(k(2) > k(1));
  }
}

TEST_CASE("sampling helpers agree across thread counts") {
  const ChainParams p(16, 0.9, 1.0);
  const Thermal th(1.3);
  const auto kinks = fcs::kink_observable(p);
  const auto one = fcs::sample_exact(kinks, p, th, 1);
  const auto two = fcs::sample_exact(kinks, p, th, 2);
  REQUIRE(one.values.size() == two.values.size());
  for (std::size_t i = 0; i < one.values.size(); ++i) CHECK(one.values[i] == two.values[i]);
  CHECK(std::abs(one.values[0] - 1.0) < 1e-12);
}
