#include "polrng/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polrng/error.hpp"
#include "polrng/philox.hpp"

namespace polrng::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Validation, path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_u64(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    bad(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(path, "expected [re, im]");
  return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

std::vector<Complex> amplitudes_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of [re, im]");
  std::vector<Complex> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(complex_from_json(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::string outcome_key(std::size_t k, std::size_t n) {
  if (n == 2) return std::to_string(k);
  return std::to_string(k / 2) + std::to_string(k % 2);
}

// Re-tags library errors with the JSON path that produced them.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::Io ? ErrorKind::Io : ErrorKind::Validation,
                path + ": " + e.what());
  }
}

Json arm_to_json(const ArmSetting& a) { return Json{{"hwp", a.hwp_deg}, {"qwp", a.qwp_deg}}; }

ArmSetting arm_from_json(const Json& j, const std::string& path) {
  return {as_double(field(j, "hwp", path), path + ".hwp"), as_double(field(j, "qwp", path), path + ".qwp")};
}

MeasurementSetting setting_from_json_at(const Json& j, const std::string& path) {
  MeasurementSetting s;
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    const auto slash = text.find('/');
    s = at_path(path, [&] {
      return slash == std::string::npos
                 ? single_setting(basis_from_string(text))
                 : pair_setting(basis_from_string(text.substr(0, slash)), basis_from_string(text.substr(slash + 1)));
    });
  } else {
    s.arm1 = arm_from_json(field(j, "arm1", path), path + ".arm1");
    if (j.contains("arm2") && !j["arm2"].is_null()) s.arm2 = arm_from_json(j["arm2"], path + ".arm2");
  }
  at_path(path, [&] {
    validate_setting(s);
    return 0;
  });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Json interval_to_json(const IntervalStats& s) {
  return Json{{"mean", s.mean}, {"std", s.stddev}, {"lower", s.lower}, {"upper", s.upper}};
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (const auto& z : m.entries()) entries.push_back(complex_to_json(z));
  return Json{{"dim", m.dim()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const std::uint64_t dim = as_u64(field(j, "dim", "matrix"), "matrix.dim");
  const Json& entries = field(j, "entries", "matrix");
  if (!entries.is_array()) bad("matrix.entries", "expected an array");
  if (entries.size() != dim * dim) {
    bad("matrix.entries", "expected " + std::to_string(dim * dim) + " entries, got " + std::to_string(entries.size()));
  }
  std::vector<Complex> values;
  for (std::size_t k = 0; k < entries.size(); ++k)
    values.push_back(complex_from_json(entries[k], "matrix.entries[" + std::to_string(k) + "]"));
  return ComplexMatrix(dim, std::move(values));
}

Json state_to_json(const DensityMatrix& rho) {
  Json j = matrix_to_json(rho.matrix());
  j["label"] = rho.label();
  if (rho.dim() == 4) j["tensor_order"] = to_string(rho.tensor_order().value_or(TensorOrder::SignalSecond));
  return j;
}

DensityMatrix state_from_json(const Json& j, bool strict) {
  ComplexMatrix m = matrix_from_json(j);
  std::string label = j.contains("label") ? as_string(j["label"], "state.label") : std::string{};
  std::optional<TensorOrder> order;
  if (j.contains("tensor_order")) {
    order = at_path("state.tensor_order", [&] { return tensor_order_from_string(as_string(j["tensor_order"], "state.tensor_order")); });
  } else if (m.dim() == 4) {
    order = TensorOrder::SignalSecond;
  }
  return at_path("state", [&] {
    return strict ? DensityMatrix::make(std::move(m), std::move(label), order)
                  : DensityMatrix::measured(std::move(m), std::move(label), order);
  });
}

Json setting_to_json(const MeasurementSetting& s) {
  Json j{{"arm1", arm_to_json(s.arm1)}};
  if (s.arm2) j["arm2"] = arm_to_json(*s.arm2);
  return j;
}

MeasurementSetting setting_from_json(const Json& j) { return setting_from_json_at(j, "setting"); }

Json record_to_json(const CountRecord& r) {
  Json j{{"setting", setting_to_json(r.setting)}};
  const std::size_t n = r.setting.outcome_count();
  if (r.probabilities) {
    Json p = Json::object();
    for (std::size_t k = 0; k < n; ++k) p[outcome_key(k, n)] = (*r.probabilities)[k];
    j["probabilities"] = p;
  } else {
    Json c = Json::object();
    for (std::size_t k = 0; k < n; ++k) c[outcome_key(k, n)] = r.counts[k];
    j["counts"] = c;
  }
  j["total_trials"] = r.total_trials;
  j["seed"] = r.seed;
  return j;
}

CountRecord record_from_json(const Json& j) {
  CountRecord r;
  r.setting = setting_from_json_at(field(j, "setting", "record"), "record.setting");
  const std::size_t n = r.setting.outcome_count();
  r.total_trials = as_u64(field(j, "total_trials", "record"), "record.total_trials");
  r.seed = j.contains("seed") ? as_u64(j["seed"], "record.seed") : 0;
  if (j.contains("probabilities")) {
    const Json& p = j["probabilities"];
    std::vector<double> probs;
    for (std::size_t k = 0; k < n; ++k)
      probs.push_back(as_double(field(p, outcome_key(k, n), "record.probabilities"), "record.probabilities." + outcome_key(k, n)));
    r.probabilities = std::move(probs);
    return r;
  }
  const Json& c = field(j, "counts", "record");
  for (std::size_t k = 0; k < n; ++k)
    r.counts.push_back(as_u64(field(c, outcome_key(k, n), "record.counts"), "record.counts." + outcome_key(k, n)));
  if (r.detected() > r.total_trials) bad("record.counts", "sum exceeds total_trials");
  return r;
}

std::string records_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream out;
  out << "hwp1,qwp1,hwp2,qwp2,n0,n1,n2,n3,total_trials,seed\n";
  out.precision(17);
  for (const auto& r : records) {
    if (r.probabilities) throw Error(ErrorKind::Validation, "exact-probability records have no CSV form");
    out << r.setting.arm1.hwp_deg << ',' << r.setting.arm1.qwp_deg << ',';
    if (r.setting.arm2) out << r.setting.arm2->hwp_deg << ',' << r.setting.arm2->qwp_deg;
    else out << ',';
    for (std::size_t k = 0; k < 4; ++k) {
      out << ',';
      if (k < r.counts.size()) out << r.counts[k];
    }
    out << ',' << r.total_trials << ',' << r.seed << '\n';
  }
  return out.str();
}

std::vector<CountRecord> records_from_csv(const std::string& text) {
  std::vector<CountRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto num = [&](const std::string& cell, const char* name) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::logic_error&) {
      bad("csv line " + std::to_string(line_no) + " column " + name, "not a number: '" + cell + "'");
    }
  };
  auto count = [&](const std::string& cell, const char* name) {
    const double v = num(cell, name);
    if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
      bad("csv line " + std::to_string(line_no) + " column " + name, "expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    if (line.rfind("hwp1", 0) == 0) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 10) bad("csv line " + std::to_string(line_no), "expected 10 columns, got " + std::to_string(cells.size()));
    CountRecord r;
    r.setting.arm1 = {num(cells[0], "hwp1"), num(cells[1], "qwp1")};
    const bool two = !cells[2].empty() || !cells[3].empty();
    if (two) r.setting.arm2 = ArmSetting{num(cells[2], "hwp2"), num(cells[3], "qwp2")};
    at_path("csv line " + std::to_string(line_no), [&] {
      validate_setting(r.setting);
      return 0;
    });
    static constexpr const char* kNames[] = {"n0", "n1", "n2", "n3"};
    for (std::size_t k = 0; k < r.setting.outcome_count(); ++k) r.counts.push_back(count(cells[4 + k], kNames[k]));
    r.total_trials = count(cells[8], "total_trials");
    r.seed = cells[9].empty() ? 0 : count(cells[9], "seed");
    if (r.detected() > r.total_trials) bad("csv line " + std::to_string(line_no), "counts exceed total_trials");
    records.push_back(std::move(r));
  }
  return records;
}

Json stokes_to_json(const StokesVector& s) { return Json(s.values); }

Json bootstrap_to_json(const BootstrapResult& b) {
  Json j{{"resamples", b.resamples},
         {"entry_std_real", b.entry_std_real},
         {"entry_std_imag", b.entry_std_imag},
         {"coherence_C", interval_to_json(b.coherence)},
         {"min_entropy_bound", interval_to_json(b.min_entropy_bound)}};
  if (b.fidelity) j["fidelity"] = interval_to_json(*b.fidelity);
  return j;
}

Json reconstruction_to_json(const Reconstruction& r, const std::optional<BootstrapResult>& bootstrap,
                            std::optional<double> fidelity_to_truth) {
  Json j{{"dim", r.raw.dim()},
         {"stokes", stokes_to_json(r.stokes)},
         {"raw", matrix_to_json(r.raw)},
         {"raw_eigenvalues", r.raw_eigenvalues},
         {"projected", state_to_json(r.projected)},
         {"projected_eigenvalues", r.projected_eigenvalues}};
  if (fidelity_to_truth) j["fidelity_to_truth"] = *fidelity_to_truth;
  if (bootstrap) j["bootstrap"] = bootstrap_to_json(*bootstrap);
  return j;
}

Json audit_to_json(const AuditReport& r) {
  Json j{{"scheme", to_string(r.scheme)},
         {"probabilities", Json::array({r.probabilities[0], r.probabilities[1]})},
         {"coherence_C", r.coherence_C},
         {"min_entropy_bound", r.min_entropy_bound},
         {"empirical_min_entropy", r.empirical_min_entropy}};
  j["fidelity_to_target"] = r.fidelity_to_target ? Json(*r.fidelity_to_target) : Json(nullptr);
  j["chsh_S"] = r.chsh_S ? Json(*r.chsh_S) : Json(nullptr);
  if (r.discard_rate) j["discard_rate"] = *r.discard_rate;
  j["raw_length"] = r.raw_length;
  j["extractable_bits"] = r.extractable_bits;
  j["bit_state"] = state_to_json(r.bit_state);
  return j;
}

Json bitstream_sidecar(const BitStream& b) {
  Json j{{"length", b.size()}, {"provenance", to_string(b.provenance())}};
  j["seed"] = b.seed() ? Json(*b.seed()) : Json(nullptr);
  j["bit_order"] = "lsb_first";
  return j;
}

void write_bitstream(const BitStream& b, const fs::path& payload) {
  std::ofstream out(payload, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + payload.string());
  out.write(reinterpret_cast<const char*>(b.bytes().data()), static_cast<std::streamsize>(b.bytes().size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + payload.string());
  fs::path sidecar = payload;
  sidecar += ".json";
  write_json(sidecar, bitstream_sidecar(b));
}

BitStream read_bitstream(const fs::path& payload) {
  fs::path sidecar = payload;
  sidecar += ".json";
  const Json meta = read_json(sidecar);
  const std::uint64_t length = as_u64(field(meta, "length", "sidecar"), "sidecar.length");
  const Provenance prov = at_path("sidecar.provenance", [&] {
    return provenance_from_string(as_string(field(meta, "provenance", "sidecar"), "sidecar.provenance"));
  });
  std::optional<std::uint64_t> seed;
  if (meta.contains("seed") && !meta["seed"].is_null()) seed = as_u64(meta["seed"], "sidecar.seed");
  const std::string data = read_text(payload);
  std::vector<std::uint8_t> bytes(data.begin(), data.end());
  return at_path(payload.string(), [&] { return BitStream(std::move(bytes), length, prov, seed); });
}

Json source_to_json(const SourceModel& s) {
  struct Visitor {
    Json operator()(const PureSource& p) const {
      Json amps = Json::array();
      for (auto z : p.state.amplitudes) amps.push_back(complex_to_json(z));
      return Json{{"kind", "pure"}, {"amplitudes", amps}};
    }
    Json operator()(const MixtureSource& m) const {
      Json comps = Json::array();
      for (const auto& [state, w] : m.components) {
        Json amps = Json::array();
        for (auto z : state.amplitudes) amps.push_back(complex_to_json(z));
        comps.push_back(Json{{"amplitudes", amps}, {"weight", w}});
      }
      return Json{{"kind", "classical_mixture"}, {"components", comps}};
    }
    Json operator()(const BellPhiPlusSource& b) const {
      return Json{{"kind", "bell_phi_plus"}, {"phase_rad", b.phase_rad}, {"visibility", b.visibility}};
    }
    Json operator()(const CustomSource& c) const { return Json{{"kind", "custom"}, {"state", state_to_json(c.state)}}; }
  };
  return std::visit(Visitor{}, s);
}

SourceModel source_from_json(const Json& j) {
  const std::string kind = as_string(field(j, "kind", "source"), "source.kind");
  if (kind == "pure") {
    return PureSource{{amplitudes_from_json(field(j, "amplitudes", "source"), "source.amplitudes")}};
  }
  if (kind == "classical_mixture") {
    const Json& comps = field(j, "components", "source");
    if (!comps.is_array()) bad("source.components", "expected an array");
    MixtureSource m;
    double total = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const std::string path = "source.components[" + std::to_string(k) + "]";
      const double w = as_double(field(comps[k], "weight", path), path + ".weight");
      if (w < 0.0) bad(path + ".weight", "must be non-negative");
      total += w;
      m.components.emplace_back(PureStateSpec{amplitudes_from_json(field(comps[k], "amplitudes", path), path + ".amplitudes")}, w);
    }
    if (std::abs(total - 1.0) > kEigTol) {
      std::ostringstream msg;
      msg << "weights sum to " << total << ", expected 1";
      bad("source.components", msg.str());
    }
    return m;
  }
  if (kind == "bell_phi_plus") {
    BellPhiPlusSource b;
    if (j.contains("phase_rad")) b.phase_rad = as_double(j["phase_rad"], "source.phase_rad");
    if (j.contains("visibility")) b.visibility = as_double(j["visibility"], "source.visibility");
    return b;
  }
  if (kind == "custom") {
    return CustomSource{at_path("source", [&] { return state_from_json(field(j, "state", "source"), true); })};
  }
  bad("source.kind", "unknown kind '" + kind + "'");
}

Json config_to_json(const RunConfig& c) {
  Json settings = Json::array();
  for (const auto& s : c.settings) settings.push_back(setting_to_json(s));
  return Json{{"source", source_to_json(c.source)},
              {"settings", settings},
              {"trials_per_setting", c.trials_per_setting},
              {"efficiency", c.efficiency},
              {"background", c.background},
              {"seed", c.seed},
              {"output_dir", c.output_dir}};
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad("config", "expected an object");
  RunConfig c;
  c.source = source_from_json(field(j, "source", "config"));
  const DensityMatrix state = at_path("source", [&] { return make_source(c.source); });

  const Json& settings = field(j, "settings", "config");
  if (settings.is_string()) {
    if (settings.get<std::string>() != "tomography") bad("settings", "expected a list or \"tomography\"");
    c.settings = tomography_settings(state.dim());
  } else if (settings.is_array()) {
    for (std::size_t k = 0; k < settings.size(); ++k)
      c.settings.push_back(setting_from_json_at(settings[k], "settings[" + std::to_string(k) + "]"));
  } else {
    bad("settings", "expected a list or \"tomography\"");
  }
  if (c.settings.empty()) bad("settings", "must not be empty");
  for (std::size_t k = 0; k < c.settings.size(); ++k) {
    const std::size_t needed = c.settings[k].outcome_count() == 2 ? 2 : 4;
    if (needed != state.dim()) {
      bad("settings[" + std::to_string(k) + "]", "arm count does not match a source of dim " + std::to_string(state.dim()));
    }
  }

  c.trials_per_setting = as_u64(field(j, "trials_per_setting", "config"), "trials_per_setting");
  if (c.trials_per_setting == 0) bad("trials_per_setting", "must be at least 1");
  if (j.contains("efficiency")) c.efficiency = as_double(j["efficiency"], "efficiency");
  if (!(c.efficiency > 0.0 && c.efficiency <= 1.0)) bad("efficiency", "must lie in (0, 1]");
  if (j.contains("background")) c.background = as_double(j["background"], "background");
  if (!(c.background >= 0.0 && c.background <= 1.0)) bad("background", "must lie in [0, 1]");
  if (j.contains("seed")) c.seed = as_u64(j["seed"], "seed");
  if (j.contains("output_dir")) c.output_dir = as_string(j["output_dir"], "output_dir");
  return c;
}

std::string config_hash(const RunConfig& c) {
  char buf[17];
  // Where the outputs go does not change them, so the location is not hashed.
  Json j = config_to_json(c);
  j.erase("output_dir");
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Validation, path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const fs::path& path, const Json& j) { write_text(path, dump(j)); }

std::vector<CountRecord> load_records(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    const fs::path manifest = path / "manifest.json";
    if (fs::exists(manifest)) {
      const Json m = read_json(manifest);
      for (const auto& f : field(m, "outputs", "manifest")) files.push_back(path / as_string(f, "manifest.outputs"));
    } else {
      for (const auto& entry : fs::directory_iterator(path))
        if (entry.path().extension() == ".json" || entry.path().extension() == ".csv") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
    }
    std::vector<CountRecord> out;
    for (const auto& f : files) {
      auto part = load_records(f);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (path.extension() == ".csv") return records_from_csv(read_text(path));
  const Json j = read_json(path);
  return at_path(path.string(), [&] {
    std::vector<CountRecord> out;
    if (j.is_array()) {
      for (const auto& r : j) out.push_back(record_from_json(r));
    } else {
      out.push_back(record_from_json(j));
    }
    return out;
  });
}

}  // namespace polrng::io
