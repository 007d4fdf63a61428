#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polrng/bits.hpp"
#include "polrng/linalg.hpp"
#include "polrng/optics.hpp"
#include "polrng/randomness.hpp"
#include "polrng/state.hpp"
#include "polrng/tomography.hpp"

namespace polrng::io {

using Json = nlohmann::ordered_json;

// {"dim": n, "entries": [[re, im], ...]} row-major.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// Matrix form plus "label" and, for dim 4, "tensor_order". Parsed states
// go through DensityMatrix::measured so tomographic data with small
// negative eigenvalues can be audited; `strict` demands a physical state.
Json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const Json& j, bool strict = false);

Json setting_to_json(const MeasurementSetting& s);
// Accepts {"arm1": {...}, "arm2": {...}} or a basis string like "HV" / "DA/RL".
MeasurementSetting setting_from_json(const Json& j);

// {"setting": ..., "counts": {"0": n, ...}, "total_trials": n, "seed": s}
// with outcome keys "0","1" (one arm) or "00","01","10","11" (arm1 digit
// first). Exact-probability records carry "probabilities" with the same keys.
Json record_to_json(const CountRecord& r);
CountRecord record_from_json(const Json& j);

// CSV: hwp1,qwp1,hwp2,qwp2,n0,n1,n2,n3,total_trials,seed -- one row per
// setting, arm2 and n2/n3 columns empty for single-photon records.
std::string records_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> records_from_csv(const std::string& text);

Json stokes_to_json(const StokesVector& s);
Json bootstrap_to_json(const BootstrapResult& b);
Json reconstruction_to_json(const Reconstruction& r, const std::optional<BootstrapResult>& bootstrap,
                            std::optional<double> fidelity_to_truth);

Json audit_to_json(const AuditReport& r);

Json bitstream_sidecar(const BitStream& b);
void write_bitstream(const BitStream& b, const std::filesystem::path& payload);
BitStream read_bitstream(const std::filesystem::path& payload);

Json source_to_json(const SourceModel& s);
SourceModel source_from_json(const Json& j);

struct RunConfig {
  SourceModel source;
  std::vector<MeasurementSetting> settings;
  std::uint64_t trials_per_setting = 0;
  double efficiency = 1.0;
  double background = 0.0;
  std::uint64_t seed = 0;
  std::string output_dir;
};

Json config_to_json(const RunConfig& c);
// Every field is validated before returning; messages name the field path.
RunConfig config_from_json(const Json& j);
// FNV-1a of the canonical config JSON without output_dir, as 16 hex digits.
std::string config_hash(const RunConfig& c);

std::string read_text(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

// Records from a CSV file, a JSON file (one record or an array), or a
// directory of record files (manifest-listed files when a manifest exists).
std::vector<CountRecord> load_records(const std::filesystem::path& path);

}  // namespace polrng::io
