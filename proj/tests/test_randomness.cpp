#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polrng/error.hpp"
#include "polrng/fixtures.hpp"
#include "polrng/randomness.hpp"

using namespace polrng;
using C = Complex;

namespace {

// Born-rule expansion of E(alpha, beta): sum over the four linear-analyzer
// outcomes with +-1 eigenvalues, evaluated entry by entry.
double correlation_oracle(const ComplexMatrix& rho, double alpha_deg, double beta_deg) {
  const double a = alpha_deg * std::numbers::pi / 180.0, b = beta_deg * std::numbers::pi / 180.0;
  const double va[2][2] = {{std::cos(a), std::sin(a)}, {-std::sin(a), std::cos(a)}};
  const double vb[2][2] = {{std::cos(b), std::sin(b)}, {-std::sin(b), std::cos(b)}};
  double e = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double psi[4];
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) psi[2 * i + k] = va[x][i] * vb[y][k];
      C p = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) p += psi[r] * rho(r, c) * psi[c];
      e += (x == y ? 1.0 : -1.0) * p.real();
    }
  return e;
}

}  // namespace

TEST_CASE("empirical min-entropy examples") {
  CHECK(min_entropy_empirical(0.5, 0.5) == 1.0);
  CHECK(min_entropy_empirical(1.0, 0.0) == 0.0);
  CHECK_FALSE(std::signbit(min_entropy_empirical(1.0, 0.0)));
  CHECK(min_entropy_empirical(0.25, 0.75) == doctest::Approx(-std::log2(0.75)));
  CHECK(std::abs(min_entropy_empirical(0.25, 0.75) - 0.415) < 5e-4);
  CHECK_THROWS_AS(min_entropy_empirical(0.6, 0.6), Error);
  CHECK_THROWS_AS(min_entropy_empirical(-0.1, 1.1), Error);
}

TEST_CASE("min-entropy bound examples") {
  CHECK(std::abs(min_entropy_bound(0.472) - 0.589) <= 0.002);
  CHECK(std::abs(min_entropy_bound(0.441) - 0.443) <= 0.002);
  CHECK(std::abs(min_entropy_bound(0.197) - 0.060) <= 0.002);
  CHECK(min_entropy_bound(0.0) == 0.0);
  CHECK(min_entropy_bound(0.5) == doctest::Approx(1.0));
  CHECK(min_entropy_bound(0.5 + 5e-13) == doctest::Approx(1.0));
  try {
    min_entropy_bound(0.51);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidCoherence);
  }
  CHECK_THROWS_AS(min_entropy_bound(-0.01), Error);
}

TEST_CASE("min-entropy bound is strictly increasing on a fine grid") {
  double prev = min_entropy_bound(0.0);
  for (int i = 1; i < 10'000; ++i) {
    const double h = min_entropy_bound(0.5 * i / 10'000.0);
    CHECK(h > prev);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    prev = h;
  }
}

TEST_CASE("pure-state min-entropy matches the bound") {
  CHECK(min_entropy_pure(0.5) == 1.0);
  CHECK(min_entropy_pure(1.0) == 0.0);
  CHECK(min_entropy_pure(0.3) == doctest::Approx(-std::log2(0.7)));
  CHECK(std::abs(min_entropy_pure(0.3) - min_entropy_bound(std::sqrt(0.21))) < 1e-12);
  for (int i = 0; i <= 99; ++i) {
    const double a = i / 99.0;
    CHECK(std::abs(min_entropy_pure(a * a) - min_entropy_bound(a * std::sqrt(1 - a * a))) < 1e-12);
  }
  CHECK_THROWS_AS(min_entropy_pure(1.5), Error);
}

TEST_CASE("bound never exceeds the empirical min-entropy") {
  Philox4x32 rng(404, 0);
  for (int t = 0; t < 10'000; ++t) {
    const auto rho = DensityMatrix::make(oracle::random_density(2, rng));
    const double ph = rho(0, 0).real(), pv = rho(1, 1).real();
    CHECK(min_entropy_bound(coherence(rho)) <= min_entropy_empirical(ph, pv) + 1e-12);
  }
}

TEST_CASE("CHSH examples") {
  CHECK(std::abs(chsh_s(fixtures::phi_plus_target()) - 2 * std::numbers::sqrt2) < 1e-9);
  // E(alpha, beta) = cos 2(alpha - beta) for Phi+.
  for (double a : {0.0, 10.0, 45.0})
    for (double b : {0.0, 22.5, 67.5})
      CHECK(std::abs(chsh_correlation(fixtures::phi_plus_target(), a, b) - std::cos(2 * (a - b) * std::numbers::pi / 180)) <
            1e-12);

  const auto hh = from_pure({{1.0, 0.0, 0.0, 0.0}});
  CHECK(std::abs(chsh_s(hh)) <= 2.0 + 1e-12);
  CHECK(std::abs(chsh_s(hh, {10, 80, 33, 120})) <= 2.0 + 1e-12);

  const auto eq10 = fixtures::measured_bell_state();
  const ChshAngles k;
  const double oracle_s = correlation_oracle(eq10.matrix(), k.a, k.b) - correlation_oracle(eq10.matrix(), k.a, k.b_prime) +
                          correlation_oracle(eq10.matrix(), k.a_prime, k.b) +
                          correlation_oracle(eq10.matrix(), k.a_prime, k.b_prime);
  CHECK(std::abs(chsh_s(eq10) - oracle_s) < 1e-12);
  CHECK(chsh_s(eq10) > 2.0);
}

TEST_CASE("CHSH respects Tsirelson and the separable bound") {
  Philox4x32 rng(505, 0);
  for (int t = 0; t < 10'000; ++t) {
    const ChshAngles angles{180 * rng.uniform(), 180 * rng.uniform(), 180 * rng.uniform(), 180 * rng.uniform()};
    const auto rho = DensityMatrix::make(oracle::random_density(4, rng));
    CHECK(std::abs(chsh_s(rho, angles)) <= 2 * std::numbers::sqrt2 + 1e-9);

    ComplexMatrix sep(4);
    double w_total = 0.0;
    std::vector<double> w(3);
    for (auto& x : w) w_total += (x = rng.uniform() + 1e-3);
    for (double x : w)
      sep = sep + (x / w_total) * tensor_product(oracle::random_density(2, rng), oracle::random_density(2, rng));
    CHECK(std::abs(chsh_s(DensityMatrix::make(sep), angles)) <= 2.0 + 1e-9);
  }
}

TEST_CASE("bit schemes parse and validate") {
  CHECK(bit_scheme_from_string("single_HV") == BitScheme::SingleHV);
  CHECK(bit_scheme_from_string("coincidence_HH_VV") == BitScheme::CoincidenceHHVV);
  CHECK(to_string(BitScheme::CoincidenceHHVV) == "coincidence_HH_VV");
  CHECK_THROWS_AS(bit_scheme_from_string("nope"), Error);
  CHECK_THROWS_AS(bit_generating_state(fixtures::diagonal_target(), BitScheme::CoincidenceHHVV), Error);
}

TEST_CASE("audit of the measured single photon") {
  AuditOptions o;
  o.target = fixtures::diagonal_target();
  o.raw_length = 1000;
  const auto r = audit(fixtures::measured_diagonal_state(), BitScheme::SingleHV, o);
  CHECK(r.probabilities[0] == doctest::Approx(0.493));
  CHECK(r.probabilities[1] == doctest::Approx(0.507));
  CHECK(std::abs(r.coherence_C - 0.472) <= 0.002);
  CHECK(r.min_entropy_bound == doctest::Approx(min_entropy_bound(r.coherence_C)));
  CHECK(r.empirical_min_entropy == doctest::Approx(-std::log2(0.507)));
  REQUIRE(r.fidelity_to_target.has_value());
  CHECK(std::abs(*r.fidelity_to_target - 0.974) <= 0.002);
  CHECK_FALSE(r.chsh_S.has_value());
  CHECK(r.extractable_bits == entropy_budget(r.min_entropy_bound, 1000));
}

TEST_CASE("audit of the measured pair, coincidence scheme") {
  AuditOptions o;
  o.target = fixtures::phi_plus_target();
  const auto r = audit(fixtures::measured_bell_state(), BitScheme::CoincidenceHHVV, o);
  CHECK(std::abs(r.probabilities[0] - 0.447) <= 0.002);
  CHECK(std::abs(r.probabilities[1] - 0.553) <= 0.002);
  CHECK(std::abs(r.coherence_C - 0.441) <= 0.002);
  CHECK(std::abs(r.min_entropy_bound - 0.443) <= 0.002);
  CHECK(std::abs(*r.fidelity_to_target - 0.904) <= 0.002);
  REQUIRE(r.chsh_S.has_value());
  CHECK(*r.chsh_S > 2.0);
  REQUIRE(r.discard_rate.has_value());
  CHECK(*r.discard_rate == doctest::Approx(0.056 + 0.030));
}

TEST_CASE("audit of the measured pair, signal arm alone") {
  const auto r = audit(fixtures::measured_bell_state(), BitScheme::SingleHV);
  CHECK(std::abs(r.coherence_C - 0.197) <= 0.002);
  CHECK(std::abs(r.min_entropy_bound - 0.060) <= 0.002);
  CHECK(r.probabilities[0] == doctest::Approx(0.439));
}

TEST_CASE("entropy budget") {
  CHECK(entropy_budget(0.589, 1'000'000) == 589'000);
  CHECK(entropy_budget(0.0, 100) == 0);
  CHECK(entropy_budget(1.0, 7) == 7);
}
