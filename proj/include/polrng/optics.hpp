#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polrng/linalg.hpp"
#include "polrng/state.hpp"

namespace polrng {

// Wave-plate angles of one polarization analyzer, in degrees, [0, 180).
struct ArmSetting {
  double hwp_deg = 0.0;
  double qwp_deg = 0.0;

  friend bool operator==(const ArmSetting&, const ArmSetting&) = default;
};

// One analyzer for single-photon measurements, two for coincidences.
// arm1 acts on the first tensor factor.
struct MeasurementSetting {
  ArmSetting arm1;
  std::optional<ArmSetting> arm2;

  std::size_t outcome_count() const noexcept { return arm2 ? 4 : 2; }
  friend bool operator==(const MeasurementSetting&, const MeasurementSetting&) = default;
};

enum class Basis { HV, DA, RL };
inline constexpr std::array<Basis, 3> kAllBases{Basis::HV, Basis::DA, Basis::RL};

enum class Waveplate { Half, Quarter };

ArmSetting basis_setting(Basis basis);
std::optional<Basis> basis_of(const ArmSetting& arm);
MeasurementSetting single_setting(Basis basis);
MeasurementSetting pair_setting(Basis arm1, Basis arm2);
std::string to_string(Basis basis);
Basis basis_from_string(const std::string& text);
// "HV", "DA/RL", or explicit angles for non-canonical settings.
std::string setting_label(const MeasurementSetting& setting);
void validate_setting(const MeasurementSetting& setting);

// Retarder with fast axis at theta: Rot(-theta) diag(1, e^{i delta}) Rot(theta).
ComplexMatrix waveplate_unitary(Waveplate kind, double theta_deg);

// Jones action of one analyzer: light passes the QWP, then the HWP.
ComplexMatrix analyzer_unitary(const ArmSetting& arm);

// {P0, P1} for the two PBS ports (transmitted H = outcome 0).
std::array<ComplexMatrix, 2> setting_projectors(const ArmSetting& arm);

// 2 projectors for one arm, 4 (arm1 outcome major) for two arms.
std::vector<ComplexMatrix> measurement_projectors(const MeasurementSetting& setting);

// Born rule. Throws Validation when the projectors do not sum to identity.
std::vector<double> outcome_probabilities(const DensityMatrix& rho,
                                          const std::vector<ComplexMatrix>& projectors);

struct CountRecord {
  MeasurementSetting setting;
  std::vector<std::uint64_t> counts;
  std::uint64_t total_trials = 0;
  std::uint64_t seed = 0;
  // Exact-probability record: Born values in place of sampled frequencies.
  std::optional<std::vector<double>> probabilities;

  std::uint64_t detected() const noexcept;
  // Normalized outcome frequencies (or the exact probabilities).
  std::vector<double> frequencies() const;
  // Weight used when combining several records.
  double weight() const noexcept;
};

struct SimulationOptions {
  double efficiency = 1.0;
  // Per-trial probability that a detection is a background event with a
  // uniformly random outcome.
  double background = 0.0;
};

// Stream id used for a setting so distinct settings draw independent streams.
std::uint64_t setting_stream(const MeasurementSetting& setting);

CountRecord simulate_counts(const DensityMatrix& rho, const MeasurementSetting& setting,
                            std::uint64_t total_trials, std::uint64_t seed,
                            const SimulationOptions& options = {});

// Record carrying the exact Born probabilities; counts are left empty.
CountRecord exact_record(const DensityMatrix& rho, const MeasurementSetting& setting);

struct PureSource {
  PureStateSpec state;
};
struct MixtureSource {
  std::vector<std::pair<PureStateSpec, double>> components;
};
struct BellPhiPlusSource {
  double phase_rad = 0.0;
  double visibility = 1.0;
};
struct CustomSource {
  DensityMatrix state;
};
using SourceModel = std::variant<PureSource, MixtureSource, BellPhiPlusSource, CustomSource>;

DensityMatrix make_source(const SourceModel& model);

}  // namespace polrng
