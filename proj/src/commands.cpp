#include "polrng/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "polrng/bits.hpp"
#include "polrng/fixtures.hpp"
#include "polrng/io.hpp"
#include "polrng/optics.hpp"
#include "polrng/randomness.hpp"
#include "polrng/tomography.hpp"

namespace polrng::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  // Avoid printing "-0.000".
  if (std::string(buf) == "-0.000") return "0.000";
  return buf;
}

fs::path prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) throw Error(ErrorKind::Validation, "output directory not set (use --out)");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
  return dir;
}

std::string file_label(const MeasurementSetting& s) {
  std::string label = setting_label(s);
  for (char& c : label)
    if (c == '/') c = '-';
  return label;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Budget:
    case ErrorKind::DegenerateSubspace:
      return kContract;
    case ErrorKind::Io:
      return kUnexpected;
    default:
      return kValidation;
  }
}

void cmd_simulate(const fs::path& config_path, const GlobalOptions& g, std::ostream& out) {
  io::RunConfig config = io::config_from_json(io::read_json(config_path));
  if (g.seed) config.seed = *g.seed;
  if (!g.out.empty()) config.output_dir = g.out.string();
  const fs::path dir = prepare_out_dir(config.output_dir);
  const DensityMatrix state = make_source(config.source);
  const SimulationOptions sim{config.efficiency, config.background};

  std::vector<CountRecord> records;
  for (const auto& s : config.settings)
    records.push_back(simulate_counts(state, s, config.trials_per_setting, config.seed, sim));

  Json outputs = Json::array();
  if (g.format == OutputFormat::Csv) {
    io::write_text(dir / "counts.csv", io::records_to_csv(records));
    outputs.push_back("counts.csv");
  } else {
    for (std::size_t k = 0; k < records.size(); ++k) {
      char name[96];
      std::snprintf(name, sizeof name, "counts_%02zu_%s.json", k, file_label(records[k].setting).c_str());
      io::write_json(dir / name, io::record_to_json(records[k]));
      outputs.push_back(name);
    }
  }
  Json config_json = io::config_to_json(config);
  config_json.erase("output_dir");
  Json manifest{{"config_hash", io::config_hash(config)},
                {"config", config_json},
                {"source_state", io::state_to_json(state)},
                {"outputs", outputs}};
  io::write_json(dir / "manifest.json", manifest);
  out << "simulated " << records.size() << " settings x " << config.trials_per_setting << " trials -> "
      << dir.string() << " (config " << io::config_hash(config) << ")\n";
}

void cmd_tomo(const TomoOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (o.dim != 2 && o.dim != 4) throw Error(ErrorKind::Validation, "--dim must be 2 or 4");
  const auto records = io::load_records(o.records);
  const Reconstruction rec = reconstruct(records, o.dim);

  std::optional<DensityMatrix> truth;
  std::optional<double> f_truth;
  if (o.truth) {
    truth = io::state_from_json(io::read_json(*o.truth));
    f_truth = fidelity(rec.projected, *truth, g.convention);
  }
  std::optional<BootstrapResult> boot;
  if (o.bootstrap > 0) {
    BootstrapOptions bo;
    bo.resamples = o.bootstrap;
    bo.seed = g.seed.value_or(0);
    bo.target = truth;
    bo.convention = g.convention;
    boot = bootstrap_uncertainty(records, o.dim, bo);
  }

  const Json report = io::reconstruction_to_json(rec, boot, f_truth);
  if (!g.out.empty()) {
    const fs::path dir = prepare_out_dir(g.out);
    if (g.format == OutputFormat::Csv) {
      std::ostringstream csv;
      csv.precision(17);
      csv << "row,col,raw_re,raw_im,projected_re,projected_im\n";
      for (std::size_t r = 0; r < o.dim; ++r)
        for (std::size_t c = 0; c < o.dim; ++c)
          csv << r << ',' << c << ',' << rec.raw(r, c).real() << ',' << rec.raw(r, c).imag() << ','
              << rec.projected(r, c).real() << ',' << rec.projected(r, c).imag() << '\n';
      io::write_text(dir / "reconstruction.csv", csv.str());
    } else {
      io::write_json(dir / "reconstruction.json", report);
    }
    io::write_json(dir / "state.json", io::state_to_json(rec.projected));
  } else {
    out << io::dump(report);
    return;
  }
  out << "reconstructed dim-" << o.dim << " state from " << records.size() << " records; min raw eigenvalue "
      << fixed3(rec.raw_eigenvalues.front());
  if (f_truth) out << "; fidelity to truth " << fixed3(*f_truth);
  out << "\n";
}

void cmd_audit(const AuditOptionsCli& o, const GlobalOptions& g, std::ostream& out) {
  const DensityMatrix rho = io::state_from_json(io::read_json(o.state));
  const BitScheme scheme = bit_scheme_from_string(o.scheme);
  AuditOptions ao;
  if (o.target) ao.target = io::state_from_json(io::read_json(*o.target), true);
  ao.convention = g.convention;
  ao.raw_length = o.raw_length;
  const AuditReport report = audit(rho, scheme, ao);

  out << "scheme            " << to_string(report.scheme) << "\n"
      << "p0, p1            " << fixed3(report.probabilities[0]) << ", " << fixed3(report.probabilities[1]) << "\n"
      << "coherence C       " << fixed3(report.coherence_C) << "\n"
      << "min-entropy bound " << fixed3(report.min_entropy_bound) << "\n"
      << "empirical H       " << fixed3(report.empirical_min_entropy) << "\n";
  if (report.fidelity_to_target) out << "fidelity          " << fixed3(*report.fidelity_to_target) << "\n";
  if (report.chsh_S) out << "CHSH S            " << fixed3(*report.chsh_S) << "\n";
  if (report.raw_length) out << "extractable bits  " << report.extractable_bits << "\n";

  if (g.out.empty()) return;
  const fs::path dir = prepare_out_dir(g.out);
  const Json j = io::audit_to_json(report);
  if (g.format == OutputFormat::Csv) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "field,value\n";
    for (const auto& [k, v] : j.items()) {
      if (k == "bit_state") continue;
      if (k == "probabilities") {
        csv << "p0," << v[0].get<double>() << "\np1," << v[1].get<double>() << '\n';
      } else {
        csv << k << ',' << (v.is_null() ? std::string{} : v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
    }
    io::write_text(dir / "audit.csv", csv.str());
  } else {
    io::write_json(dir / "audit.json", j);
  }
}

void cmd_bits(const BitsOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (o.n == 0) throw Error(ErrorKind::Validation, "--n must be at least 1");
  if (o.extractor != "none" && o.extractor != "von_neumann" && o.extractor != "toeplitz") {
    throw Error(ErrorKind::Validation, "--extractor must be none, von_neumann or toeplitz");
  }
  const DensityMatrix rho = io::state_from_json(io::read_json(o.state));
  const BitScheme scheme = bit_scheme_from_string(o.scheme);
  AuditOptions ao;
  ao.raw_length = o.n;
  const AuditReport report = audit(rho, scheme, ao);
  const std::uint64_t seed = g.seed.value_or(0);

  // Check the budget before spending time on generation.
  std::uint64_t out_len = 0;
  if (o.extractor == "toeplitz") {
    out_len = o.out_len.value_or(report.extractable_bits);
    if (out_len > report.extractable_bits) {
      throw Error(ErrorKind::Budget, "requested " + std::to_string(out_len) + " bits exceeds the entropy budget of " +
                                         std::to_string(report.extractable_bits) + " (H_min " +
                                         fixed3(report.min_entropy_bound) + " x " + std::to_string(o.n) + ")");
    }
  }

  const fs::path dir = prepare_out_dir(g.out);
  const GeneratedBits raw = generate_bits(rho, scheme, o.n, seed);
  io::write_bitstream(raw.bits, dir / "raw.bin");
  out << "raw: " << raw.bits.size() << " bits, ones fraction "
      << fixed3(static_cast<double>(raw.bits.count_ones()) / static_cast<double>(raw.bits.size()));
  if (scheme == BitScheme::CoincidenceHHVV) out << ", discarded " << raw.discarded;
  out << "\n";

  if (o.extractor == "none") return;
  const BitStream extracted = o.extractor == "von_neumann"
                                  ? extract_von_neumann(raw.bits)
                                  : extract_toeplitz(raw.bits, out_len, seed, report.extractable_bits);
  io::write_bitstream(extracted, dir / "extracted.bin");
  out << o.extractor << ": " << extracted.size() << " bits\n";
}

namespace {

struct Row {
  std::string section;
  std::string quantity;
  double computed;
  double published;
  std::string status;
};

}  // namespace

bool cmd_reproduce_paper(const GlobalOptions& g, std::ostream& out) {
  constexpr double kTol = 0.002;
  const bool squared = g.convention == FidelityConvention::Squared;
  std::vector<Row> rows;
  auto compare = [&](std::string section, std::string quantity, double computed, double published) {
    const std::string status = std::abs(computed - published) <= kTol ? "PASS" : "FAIL";
    rows.push_back({std::move(section), std::move(quantity), computed, published, status});
  };
  auto fid_row = [&](std::string section, std::string quantity, double computed, double published) {
    if (squared) {
      rows.push_back({std::move(section), std::move(quantity) + " [squared]", computed, published, "CONVENTION"});
    } else {
      compare(std::move(section), std::move(quantity), computed, published);
    }
  };

  AuditOptions ao;
  ao.convention = g.convention;

  const DensityMatrix single = fixtures::measured_diagonal_state();
  ao.target = fixtures::diagonal_target();
  const AuditReport a1 = audit(single, BitScheme::SingleHV, ao);
  compare("single photon", "p_H", a1.probabilities[0], 0.493);
  compare("single photon", "p_V", a1.probabilities[1], 0.507);
  compare("single photon", "C", a1.coherence_C, 0.472);
  compare("single photon", "H_min", a1.min_entropy_bound, 0.589);
  compare("single photon", "H_min from printed C=0.472", min_entropy_bound(0.472), 0.589);
  fid_row("single photon", "fidelity to |D>", *a1.fidelity_to_target, 0.974);

  const DensityMatrix pair = fixtures::measured_bell_state();
  ao.target = fixtures::phi_plus_target();
  const AuditReport a2 = audit(pair, BitScheme::CoincidenceHHVV, ao);
  const ComplexMatrix sub_pub = fixtures::published_subspace_block();
  const auto& sub = a2.bit_state;
  compare("HH/VV subspace", "rho_11", sub(0, 0).real(), sub_pub(0, 0).real());
  compare("HH/VV subspace", "Re rho_14", sub(0, 1).real(), sub_pub(0, 1).real());
  compare("HH/VV subspace", "Im rho_14", sub(0, 1).imag(), sub_pub(0, 1).imag());
  compare("HH/VV subspace", "rho_44", sub(1, 1).real(), sub_pub(1, 1).real());
  compare("HH/VV subspace", "C", a2.coherence_C, 0.441);
  compare("HH/VV subspace", "H_min", a2.min_entropy_bound, 0.443);
  fid_row("HH/VV subspace", "fidelity to |Phi+>", *a2.fidelity_to_target, 0.904);
  rows.push_back({"HH/VV subspace", "CHSH S from state (> 2; 2.457 was measured directly)", *a2.chsh_S, 2.457,
                  *a2.chsh_S > 2.0 ? "PASS" : "FAIL"});

  const AuditReport a3 = audit(pair, BitScheme::SingleHV, {});
  const ComplexMatrix red_pub = fixtures::published_reduced_state();
  const auto& red = a3.bit_state;
  compare("signal photon", "rho_11", red(0, 0).real(), red_pub(0, 0).real());
  compare("signal photon", "Re rho_12", red(0, 1).real(), red_pub(0, 1).real());
  compare("signal photon", "Im rho_12", red(0, 1).imag(), red_pub(0, 1).imag());
  compare("signal photon", "rho_22", red(1, 1).real(), red_pub(1, 1).real());
  compare("signal photon", "C", a3.coherence_C, 0.197);
  compare("signal photon", "H_min", a3.min_entropy_bound, 0.060);

  bool ok = true;
  out << "section          quantity                                              computed  published  status\n";
  for (const auto& r : rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-53s %8s  %9s  %s\n", r.section.c_str(), r.quantity.c_str(),
                  fixed3(r.computed).c_str(), fixed3(r.published).c_str(), r.status.c_str());
    out << line;
    if (r.status == "FAIL") ok = false;
  }
  if (squared) {
    out << "note: fidelity rows use the squared convention; the published values match the root convention\n";
  }
  out << (ok ? "all rows within 0.002\n" : "some rows outside 0.002\n");

  if (!g.out.empty()) {
    const fs::path dir = prepare_out_dir(g.out);
    if (g.format == OutputFormat::Csv) {
      std::ostringstream csv;
      csv.precision(17);
      csv << "section,quantity,computed,published,status\n";
      for (const auto& r : rows)
        csv << r.section << ',' << '"' << r.quantity << '"' << ',' << r.computed << ',' << r.published << ','
            << r.status << '\n';
      io::write_text(dir / "reproduce.csv", csv.str());
    } else {
      Json j = Json::array();
      for (const auto& r : rows)
        j.push_back(Json{{"section", r.section},
                         {"quantity", r.quantity},
                         {"computed", r.computed},
                         {"published", r.published},
                         {"status", r.status}});
      io::write_json(dir / "reproduce.json",
                     Json{{"convention", squared ? "squared" : "root"}, {"tolerance", kTol}, {"rows", j}});
    }
  }
  return ok;
}

}  // namespace polrng::cli
