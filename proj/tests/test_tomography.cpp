#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polrng/error.hpp"
#include "polrng/fixtures.hpp"
#include "polrng/randomness.hpp"
#include "polrng/tomography.hpp"

using namespace polrng;
using C = Complex;

namespace {

std::vector<CountRecord> exact_records(const DensityMatrix& rho) {
  std::vector<CountRecord> out;
  for (const auto& s : tomography_settings(rho.dim())) out.push_back(exact_record(rho, s));
  return out;
}

std::vector<CountRecord> simulated_records(const DensityMatrix& rho, std::uint64_t trials, std::uint64_t seed) {
  std::vector<CountRecord> out;
  for (const auto& s : tomography_settings(rho.dim())) out.push_back(simulate_counts(rho, s, trials, seed));
  return out;
}

}  // namespace

TEST_CASE("single-photon Stokes examples") {
  auto s = stokes_from_counts_single(exact_records(from_pure({{1.0, 0.0}})));
  CHECK(s[0] == 1.0);
  CHECK(std::abs(s[1]) < 1e-12);
  CHECK(std::abs(s[2]) < 1e-12);
  CHECK(std::abs(s[3] - 1.0) < 1e-12);

  s = stokes_from_counts_single(exact_records(fixtures::diagonal_target()));
  CHECK(std::abs(s[1] - 1.0) < 1e-12);
  CHECK(std::abs(s[3]) < 1e-12);

  // rho01 = (S1 - i S2) / 2 with rho01 = 0.449 + 0.144i.
  const auto eq9 = fixtures::measured_diagonal_state();
  s = stokes_from_counts_single(exact_records(eq9));
  CHECK(std::abs(s[1] - 0.898) < 1e-12);
  CHECK(std::abs(s[2] + 0.288) < 1e-12);
  CHECK(std::abs(s[3] + 0.014) < 1e-12);
  CHECK(reconstruct_single(s).approx_equal(eq9.matrix(), 1e-12));
}

TEST_CASE("reconstruct_single examples") {
  CHECK(reconstruct_single({{1, 0, 0, 0}}).approx_equal(0.5 * ComplexMatrix::identity(2)));
  CHECK(reconstruct_single({{1, 1, 0, 0}}).approx_equal(fixtures::diagonal_target().matrix()));
  const auto raw = reconstruct_single({{1, 0.9, 0.5, 0.4}});
  CHECK(raw.is_hermitian(1e-12));
  CHECK(hermitian_eig(raw).eigenvalues[0] < 0.0);
  CHECK_FALSE(DensityMatrix::measured(raw).physical());
}

TEST_CASE("two-photon Stokes examples") {
  auto s = stokes_from_counts_two(exact_records(fixtures::phi_plus_target()));
  CHECK(s.two_photon());
  CHECK(std::abs(s.at(3, 3) - 1.0) < 1e-12);
  CHECK(std::abs(s.at(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(s.at(2, 2) + 1.0) < 1e-12);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(std::abs(s.at(i, 0)) < 1e-12);
    CHECK(std::abs(s.at(0, i)) < 1e-12);
  }

  const auto hh = from_pure({{1.0, 0.0, 0.0, 0.0}});
  s = stokes_from_counts_two(exact_records(hh));
  CHECK(std::abs(s.at(3, 0) - 1.0) < 1e-12);
  CHECK(std::abs(s.at(0, 3) - 1.0) < 1e-12);
  CHECK(std::abs(s.at(3, 3) - 1.0) < 1e-12);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i == 1 || i == 2 || j == 1 || j == 2) CHECK(std::abs(s.at(i, j)) < 1e-12);
  CHECK(reconstruct_two(s).approx_equal(hh.matrix(), 1e-12));

  const auto eq10 = fixtures::measured_bell_state();
  CHECK(reconstruct_two(stokes_from_counts_two(exact_records(eq10))).approx_equal(eq10.matrix(), 1e-12));
}

TEST_CASE("exact-probability round trip over random states") {
  Philox4x32 rng(314, 0);
  for (int t = 0; t < 500; ++t) {
    const std::size_t dim = t % 2 ? 4 : 2;
    const auto rho = DensityMatrix::make(oracle::random_density(dim, rng));
    const auto rec = reconstruct(exact_records(rho), dim);
    CHECK(rec.raw.approx_equal(rho.matrix(), 1e-12));
  }
}

TEST_CASE("stokes marginals are the counts-weighted average") {
  // Two-photon records where only one setting carries the HV marginal of arm 2
  // differently; weights follow detected counts.
  const auto hh = from_pure({{1.0, 0.0, 0.0, 0.0}});
  auto recs = simulated_records(hh, 1000, 1);
  for (auto& r : recs) {
    CHECK(r.detected() == 1000);
  }
  const auto s = stokes_from_counts_two(recs);
  CHECK(s.at(3, 0) == doctest::Approx(1.0));
  CHECK(s.at(0, 3) == doctest::Approx(1.0));
}

TEST_CASE("missing settings are reported") {
  auto recs = exact_records(fixtures::phi_plus_target());
  recs.erase(recs.begin() + 4);
  const auto missing = missing_settings(recs, 4);
  REQUIRE(missing.size() == 1);
  CHECK(missing[0] == "DA/DA");
  try {
    stokes_from_counts_two(recs);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingSetting);
    CHECK(std::string(e.what()).find("DA/DA") != std::string::npos);
  }
  auto single = exact_records(fixtures::diagonal_target());
  single.pop_back();
  CHECK_THROWS_AS(stokes_from_counts_single(single), Error);
}

TEST_CASE("zero-count records are rejected") {
  auto recs = simulated_records(fixtures::diagonal_target(), 100, 1);
  recs[0].counts = {0, 0};
  CHECK_THROWS_AS(stokes_from_counts_single(recs), Error);
}

TEST_CASE("water-filling truncation examples") {
  auto t = truncate_spectrum({1.2, -0.2});
  CHECK(t[0] == doctest::Approx(1.0));
  CHECK(t[1] == doctest::Approx(0.0));
  t = truncate_spectrum({0.6, 0.5, 0.05, -0.15});
  CHECK(t[0] == doctest::Approx(0.55));
  CHECK(t[1] == doctest::Approx(0.45));
  CHECK(t[2] == 0.0);
  CHECK(t[3] == 0.0);
  // Order is preserved.
  t = truncate_spectrum({-0.15, 0.05, 0.5, 0.6});
  CHECK(t[3] == doctest::Approx(0.55));
}

TEST_CASE("project_to_physical leaves physical states alone") {
  Philox4x32 rng(15, 0);
  for (int t = 0; t < 50; ++t) {
    const auto m = oracle::random_density(t % 2 ? 4 : 2, rng);
    CHECK(project_to_physical(m).matrix().approx_equal(m, 1e-12));
  }
}

TEST_CASE("project_to_physical matches a Bloch-ball grid search") {
  Philox4x32 rng(16, 0);
  for (int t = 0; t < 100; ++t) {
    // Bloch vectors of length up to 1.6 so most inputs need projection.
    const double x = 1.6 * (2 * rng.uniform() - 1), y = 1.6 * (2 * rng.uniform() - 1),
                 z = 1.6 * (2 * rng.uniform() - 1);
    const auto raw = oracle::bloch_state(x, y, z);
    const auto projected = project_to_physical(raw);
    CHECK(projected.physical());
    CHECK(std::abs(projected.matrix().trace() - C(1.0)) < 1e-12);
    const auto best = oracle::closest_qubit_state_by_grid(raw);
    CHECK((projected.matrix() - best).frobenius_norm() <= 2e-3);
  }
}

TEST_CASE("projected two-photon states are PSD and unit trace") {
  Philox4x32 rng(17, 0);
  for (int t = 0; t < 50; ++t) {
    const auto h = oracle::random_hermitian(4, rng);
    ComplexMatrix m = h + (1.0 - h.trace().real()) * 0.25 * ComplexMatrix::identity(4);
    const auto p = project_to_physical(m);
    CHECK(std::abs(p.matrix().trace() - C(1.0)) < 1e-12);
    for (double l : hermitian_eig(p.matrix()).eigenvalues) CHECK(l >= -1e-12);
  }
}

TEST_CASE("end-to-end reconstruction from simulated counts") {
  Philox4x32 rng(18, 0);
  for (int t = 0; t < 6; ++t) {
    const std::size_t dim = t % 2 ? 4 : 2;
    const auto rho = DensityMatrix::make(oracle::random_density(dim, rng));
    const auto rec = reconstruct(simulated_records(rho, 1'000'000, 100 + t), dim);
    CHECK(fidelity(rec.projected, rho) >= 0.995);
  }
}

TEST_CASE("bootstrap without resampling has zero spread") {
  const auto recs = exact_records(fixtures::diagonal_target());
  BootstrapOptions o;
  o.resample = false;
  o.resamples = 100;
  const auto b = bootstrap_uncertainty(recs, 2, o);
  for (double s : b.entry_std_real) CHECK(s == doctest::Approx(0.0));
  for (double s : b.entry_std_imag) CHECK(s == doctest::Approx(0.0));
  CHECK(b.coherence.stddev == doctest::Approx(0.0));
  CHECK(b.coherence.mean == doctest::Approx(0.5));
}

TEST_CASE("bootstrap rejects too few resamples and exact records") {
  const auto recs = exact_records(fixtures::diagonal_target());
  BootstrapOptions o;
  o.resamples = 50;
  o.resample = false;
  CHECK_THROWS_AS(bootstrap_uncertainty(recs, 2, o), Error);
  o.resamples = 100;
  o.resample = true;
  CHECK_THROWS_AS(bootstrap_uncertainty(recs, 2, o), Error);
}

TEST_CASE("bootstrap spread scales as 1/sqrt(N)") {
  // Partially coherent state so C is away from its 0.5 ceiling.
  const auto rho = DensityMatrix::make({{0.5, 0.3}, {0.3, 0.5}});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    BootstrapOptions o;
    o.resamples = 400;
    o.seed = seed;
    const auto small = bootstrap_uncertainty(simulated_records(rho, 10'000, seed), 2, o);
    const auto large = bootstrap_uncertainty(simulated_records(rho, 40'000, seed + 10), 2, o);
    const double ratio = small.coherence.stddev / large.coherence.stddev;
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
  }
}

TEST_CASE("bootstrap is deterministic and reports fidelity when given a target") {
  const auto recs = simulated_records(fixtures::diagonal_target(), 10'000, 9);
  BootstrapOptions o;
  o.resamples = 100;
  o.seed = 5;
  o.target = fixtures::diagonal_target();
  const auto a = bootstrap_uncertainty(recs, 2, o);
  const auto b = bootstrap_uncertainty(recs, 2, o);
  CHECK(a.entry_std_real == b.entry_std_real);
  CHECK(a.coherence.lower == b.coherence.lower);
  REQUIRE(a.fidelity.has_value());
  CHECK(a.fidelity->mean > 0.99);
  CHECK(a.fidelity->lower <= a.fidelity->upper);
}

TEST_CASE("two-photon bootstrap takes C from the HH/VV subspace") {
  const auto recs = simulated_records(fixtures::phi_plus_target(), 20'000, 4);
  BootstrapOptions o;
  o.resamples = 100;
  const auto b = bootstrap_uncertainty(recs, 4, o);
  CHECK(b.entry_std_real.size() == 16);
  CHECK(b.coherence.mean > 0.48);
  CHECK(b.min_entropy_bound.mean > 0.8);
}
