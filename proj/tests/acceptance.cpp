// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polrng/bits.hpp"
#include "polrng/error.hpp"
#include "polrng/fixtures.hpp"
#include "polrng/io.hpp"
#include "polrng/randomness.hpp"
#include "polrng/tomography.hpp"

using namespace polrng;
namespace fs = std::filesystem;

namespace {

constexpr double kRefTol = 0.002;

// Collects sub-check failures for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.6f, want %.6f +- %g", what.c_str(), got, want, tol);
    expect(std::abs(got - want) <= tol, buf);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

int g_failed = 0;

void criterion(int n, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const bool ok = c.failures.empty();
  if (!ok) ++g_failed;
  std::printf("%s  criterion %d: %s", ok ? "PASS" : "FAIL", n, title.c_str());
  if (!c.notes.empty()) {
    std::printf(" (");
    for (std::size_t i = 0; i < c.notes.size(); ++i) std::printf("%s%s", i ? "; " : "", c.notes[i].c_str());
    std::printf(")");
  }
  std::printf("\n");
  for (const auto& f : c.failures) std::printf("      %s\n", f.c_str());
  std::fflush(stdout);
}

std::vector<CountRecord> simulated(const DensityMatrix& rho, std::uint64_t trials, std::uint64_t seed) {
  std::vector<CountRecord> out;
  for (const auto& s : tomography_settings(rho.dim())) out.push_back(simulate_counts(rho, s, trials, seed));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string(POLRNG_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Every regular file under `a` must exist under `b` with identical bytes.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = b / fs::relative(e.path(), a);
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
  }
  return true;
}

}  // namespace

int main() {
  criterion(1, "reference-value reproduction from the printed matrices (tol 0.002)", [](Check& c) {
    AuditOptions o;
    o.target = fixtures::diagonal_target();
    const auto a = audit(fixtures::measured_diagonal_state(), BitScheme::SingleHV, o);
    c.near(a.probabilities[0], 0.493, kRefTol, "single photon p_H");
    c.near(a.probabilities[1], 0.507, kRefTol, "single photon p_V");
    c.near(a.coherence_C, 0.472, kRefTol, "single photon C");
    c.near(a.min_entropy_bound, 0.589, kRefTol, "single photon H_min");
    c.near(*a.fidelity_to_target, 0.974, kRefTol, "single photon F_root to |D>");

    const auto pair = fixtures::measured_bell_state();
    const auto sub = subspace_restrict(pair, {0, 3});
    c.near(sub.matrix().max_abs_diff(fixtures::published_subspace_block()), 0.0, kRefTol,
           "HH/VV block max entry deviation");
    o.target = fixtures::phi_plus_target();
    const auto b = audit(pair, BitScheme::CoincidenceHHVV, o);
    c.near(b.coherence_C, 0.441, kRefTol, "HH/VV C");
    c.near(b.min_entropy_bound, 0.443, kRefTol, "HH/VV H_min");
    c.near(fidelity(pair, fixtures::phi_plus_target()), 0.904, kRefTol, "pair F_root to |Phi+>");

    const auto reduced = partial_trace(pair.matrix(), TracedFactor::First);
    c.near(reduced.max_abs_diff(fixtures::published_reduced_state()), 0.0, kRefTol,
           "signal reduced state max entry deviation");
    const auto s = audit(pair, BitScheme::SingleHV);
    c.near(s.coherence_C, 0.197, kRefTol, "signal C");
    c.near(s.min_entropy_bound, 0.060, kRefTol, "signal H_min");
  });

  criterion(2, "min-entropy bound endpoints, monotonicity and pure-state identity", [](Check& c) {
    c.near(min_entropy_bound(0.0), 0.0, 1e-12, "H(0)");
    c.near(min_entropy_bound(0.5), 1.0, 1e-12, "H(0.5)");
    double prev = min_entropy_bound(0.0);
    int non_increasing = 0;
    for (int i = 1; i <= 10'000; ++i) {
      const double h = min_entropy_bound(0.5 * i / 10'000.0);
      if (!(h > prev)) ++non_increasing;
      prev = h;
    }
    c.expect(non_increasing == 0, std::to_string(non_increasing) + " non-increasing steps on the grid");
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double a = i / 99.0;
      const double pure = -std::log2(std::max(a * a, 1 - a * a));
      worst = std::max(worst, std::abs(min_entropy_bound(a * std::sqrt(1 - a * a)) - pure));
    }
    c.near(worst, 0.0, 1e-12, "pure-state identity worst deviation");
  });

  criterion(3, "tomography round trip (500 exact, 1e-12) and end to end at 1e6 trials (50 states, F >= 0.995)", [](Check& c) {
    Philox4x32 rng(3003, 0);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      const std::size_t dim = t % 2 ? 4 : 2;
      const auto rho = DensityMatrix::make(oracle::random_density(dim, rng));
      std::vector<CountRecord> recs;
      for (const auto& s : tomography_settings(dim)) recs.push_back(exact_record(rho, s));
      worst = std::max(worst, reconstruct(recs, dim).raw.max_abs_diff(rho.matrix()));
    }
    c.near(worst, 0.0, 1e-12, "exact round trip worst entry deviation");

    double min_f = 1.0;
    for (int t = 0; t < 50; ++t) {
      const std::size_t dim = t % 2 ? 4 : 2;
      const auto rho = DensityMatrix::make(oracle::random_density(dim, rng));
      const auto rec = reconstruct(simulated(rho, 1'000'000, 5000 + t), dim);
      min_f = std::min(min_f, fidelity(rec.projected, rho));
    }
    c.expect(min_f >= 0.995, "minimum end-to-end fidelity " + std::to_string(min_f));
    char buf[64];
    std::snprintf(buf, sizeof buf, "min F = %.5f", min_f);
    c.note(buf);
  });

  criterion(4, "physicality projection: PSD, unit trace, grid oracle within 2e-3 on 100 inputs", [](Check& c) {
    Philox4x32 rng(4004, 0);
    double worst = 0.0;
    int tested = 0;
    while (tested < 100) {
      const double x = 1.6 * (2 * rng.uniform() - 1), y = 1.6 * (2 * rng.uniform() - 1), z = 1.6 * (2 * rng.uniform() - 1);
      if (x * x + y * y + z * z <= 1.0) continue;  // unphysical inputs only
      ++tested;
      const auto raw = oracle::bloch_state(x, y, z);
      const auto p = project_to_physical(raw);
      c.expect(p.physical() && std::abs(p.matrix().trace() - Complex(1.0)) < 1e-12, "dim-2 output not a state");
      worst = std::max(worst, (p.matrix() - oracle::closest_qubit_state_by_grid(raw)).frobenius_norm());
    }
    c.near(worst, 0.0, 2e-3, "worst Frobenius distance to grid oracle");
    for (int t = 0; t < 100; ++t) {
      const auto h = oracle::random_hermitian(4, rng);
      const ComplexMatrix m = h + (1.0 - h.trace().real()) * 0.25 * ComplexMatrix::identity(4);
      const auto p = project_to_physical(m);
      double min_eig = 0.0;
      for (double l : hermitian_eig(p.matrix()).eigenvalues) min_eig = std::min(min_eig, l);
      c.expect(min_eig >= -1e-12 && std::abs(p.matrix().trace() - Complex(1.0)) < 1e-12, "dim-4 output not a state");
    }
  });

  criterion(5, "CHSH: Phi+ gives 2 sqrt 2, separable states <= 2, printed pair > 2", [](Check& c) {
    c.near(chsh_s(fixtures::phi_plus_target()), 2 * std::numbers::sqrt2, 1e-9, "S(Phi+)");
    Philox4x32 rng(5005, 0);
    double worst = 0.0;
    for (int t = 0; t < 10'000; ++t) {
      ComplexMatrix sep(4);
      std::vector<double> w(1 + rng() % 4);
      double total = 0.0;
      for (auto& x : w) total += (x = rng.uniform() + 1e-3);
      for (double x : w)
        sep = sep + (x / total) * tensor_product(oracle::random_density(2, rng), oracle::random_density(2, rng));
      const ChshAngles angles = t % 2 ? ChshAngles{} : ChshAngles{180 * rng.uniform(), 180 * rng.uniform(),
                                                                  180 * rng.uniform(), 180 * rng.uniform()};
      worst = std::max(worst, std::abs(chsh_s(DensityMatrix::make(sep), angles)));
    }
    c.expect(worst <= 2.0 + 1e-9, "separable |S| reached " + std::to_string(worst));
    const double s = chsh_s(fixtures::measured_bell_state());
    c.expect(s > 2.0, "printed pair S = " + std::to_string(s));
    char buf[96];
    std::snprintf(buf, sizeof buf, "printed pair S = %.4f, separable max %.4f", s, worst);
    c.note(buf);
  });

  criterion(6, "extraction: von Neumann unbiased, Toeplitz budget accepts 0.58n and rejects 0.60n", [](Check& c) {
    const std::uint64_t n = 1'000'000;
    const auto biased = from_pure({{std::sqrt(0.25), std::sqrt(0.75)}});
    const auto raw = generate_bits(biased, BitScheme::SingleHV, n, 606).bits;
    const auto vn = extract_von_neumann(raw);
    const double m = double(vn.size());
    c.expect(m > 0, "von Neumann output empty");
    const double bias = std::abs(double(vn.count_ones()) / m - 0.5);
    c.expect(bias < 5 * std::sqrt(0.25 / m), "von Neumann bias " + std::to_string(bias));

    const auto eq9 = fixtures::measured_diagonal_state();
    const auto report = audit(eq9, BitScheme::SingleHV, {std::nullopt, FidelityConvention::Root, {}, n});
    const auto budget = report.extractable_bits;
    const auto raw9 = generate_bits(eq9, BitScheme::SingleHV, n, 607).bits;
    const auto out = extract_toeplitz(raw9, 580'000, 608, budget);
    c.expect(out.size() == 580'000, "0.58n extraction length");
    const double ones = double(out.count_ones());
    c.expect(std::abs(ones - 290'000) < 5 * std::sqrt(580'000 / 4.0), "0.58n output fails monobit");
    bool rejected = false;
    try {
      extract_toeplitz(raw9, 600'000, 608, budget);
    } catch (const Error& e) {
      rejected = e.kind() == ErrorKind::Budget;
    }
    c.expect(rejected, "0.60n extraction was not rejected with a budget error");
    char buf[96];
    std::snprintf(buf, sizeof buf, "vN bias %.5f over %.0f bits; budget %llu", bias, m,
                  static_cast<unsigned long long>(budget));
    c.note(buf);
  });

  criterion(7, "determinism: seeded pipelines run twice give byte-identical artifacts", [](Check& c) {
    const fs::path root = fs::temp_directory_path() / "polrng_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    io::write_json(root / "eq9.json", io::state_to_json(fixtures::measured_diagonal_state()));
    io::write_json(root / "eq10.json", io::state_to_json(fixtures::measured_bell_state()));
    io::write_json(root / "phi.json", io::state_to_json(fixtures::phi_plus_target()));
    io::write_text(root / "config.json",
                   R"({"source": {"kind": "bell_phi_plus", "phase_rad": 0.3, "visibility": 0.9},
                       "settings": "tomography", "trials_per_setting": 200000, "efficiency": 0.3,
                       "background": 0.01, "seed": 7})");
    const std::vector<std::string> pipelines = {
        "simulate " + (root / "config.json").string(),
        "--seed 11 simulate " + (root / "config.json").string(),
        "--format csv simulate " + (root / "config.json").string(),
        "--seed 3 audit " + (root / "eq10.json").string() + " --scheme coincidence_HH_VV --target " +
            (root / "phi.json").string() + " --raw-length 100000",
        "--seed 5 bits " + (root / "eq9.json").string() + " --n 200000 --extractor toeplitz",
        "--seed 5 bits " + (root / "eq10.json").string() + " --scheme coincidence_HH_VV --n 200000 --extractor von_neumann",
        "reproduce-paper",
    };
    std::size_t files = 0;
    for (std::size_t k = 0; k < pipelines.size(); ++k) {
      std::string stdout_text[2];
      for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / ("p" + std::to_string(k) + "_" + std::to_string(run));
        run_cli("--out " + dir.string() + " " + pipelines[k], root / "stdout.txt");
        stdout_text[run] = slurp(root / "stdout.txt");
      }
      const fs::path a = root / ("p" + std::to_string(k) + "_0"), b = root / ("p" + std::to_string(k) + "_1");
      c.expect(fs::exists(a) && same_tree(a, b, files), "artifacts differ: " + pipelines[k]);
    }
    // Tomography with bootstrap on the simulated records.
    for (int run = 0; run < 2; ++run)
      run_cli("--seed 9 --out " + (root / ("tomo_" + std::to_string(run))).string() + " tomo " +
                  (root / "p0_0").string() + " --dim 4 --bootstrap 100",
              root / "stdout.txt");
    c.expect(fs::exists(root / "tomo_0" / "reconstruction.json") && same_tree(root / "tomo_0", root / "tomo_1", files),
             "tomography artifacts differ");

    // Library-level: same seed, same records and bits.
    const auto rho = fixtures::phi_plus_target();
    const auto r1 = simulated(rho, 10'000, 42), r2 = simulated(rho, 10'000, 42);
    bool same = true;
    for (std::size_t k = 0; k < r1.size(); ++k) same &= r1[k].counts == r2[k].counts;
    c.expect(same, "simulate_counts not deterministic");
    c.expect(generate_bits(rho, BitScheme::CoincidenceHHVV, 10'000, 1).bits ==
                 generate_bits(rho, BitScheme::CoincidenceHHVV, 10'000, 1).bits,
             "generate_bits not deterministic");
    c.note(std::to_string(files) + " files compared");
    fs::remove_all(root);
  });

  std::printf("%s: %d of 7 criteria failed\n", g_failed ? "FAIL" : "PASS", g_failed);
  return g_failed ? 1 : 0;
}
