#include "polrng/optics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

#include "polrng/error.hpp"
#include "polrng/philox.hpp"

namespace polrng {

namespace {

constexpr double kAngleMatchTol = 1e-9;

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

ComplexMatrix rotation(double theta_rad) {
  const double c = std::cos(theta_rad), s = std::sin(theta_rad);
  return {{c, s}, {-s, c}};
}

bool same_angle(double a, double b) { return std::abs(a - b) <= kAngleMatchTol; }

void validate_arm(const ArmSetting& arm, const char* name) {
  for (const auto& [value, plate] : {std::pair{arm.hwp_deg, "hwp"}, std::pair{arm.qwp_deg, "qwp"}}) {
    if (!(value >= 0.0 && value < 180.0)) {
      std::ostringstream msg;
      msg << "setting." << name << "." << plate << " = " << value << " must lie in [0, 180)";
      throw Error(ErrorKind::Validation, msg.str());
    }
  }
}

}  // namespace

ArmSetting basis_setting(Basis basis) {
  switch (basis) {
    case Basis::HV: return {0.0, 0.0};
    case Basis::DA: return {22.5, 45.0};
    case Basis::RL: return {0.0, 45.0};
  }
  return {};
}

std::optional<Basis> basis_of(const ArmSetting& arm) {
  for (Basis b : kAllBases) {
    const ArmSetting ref = basis_setting(b);
    if (same_angle(ref.hwp_deg, arm.hwp_deg) && same_angle(ref.qwp_deg, arm.qwp_deg)) return b;
  }
  return std::nullopt;
}

MeasurementSetting single_setting(Basis basis) { return {basis_setting(basis), std::nullopt}; }

MeasurementSetting pair_setting(Basis arm1, Basis arm2) {
  return {basis_setting(arm1), basis_setting(arm2)};
}

std::string to_string(Basis basis) {
  switch (basis) {
    case Basis::HV: return "HV";
    case Basis::DA: return "DA";
    case Basis::RL: return "RL";
  }
  return "?";
}

Basis basis_from_string(const std::string& text) {
  for (Basis b : kAllBases)
    if (to_string(b) == text) return b;
  throw Error(ErrorKind::Validation, "unknown basis '" + text + "' (expected HV, DA or RL)");
}

std::string setting_label(const MeasurementSetting& setting) {
  auto arm_label = [](const ArmSetting& arm) {
    if (auto b = basis_of(arm)) return to_string(*b);
    char buf[64];
    std::snprintf(buf, sizeof buf, "h%.6f_q%.6f", arm.hwp_deg, arm.qwp_deg);
    return std::string(buf);
  };
  std::string label = arm_label(setting.arm1);
  if (setting.arm2) label += "/" + arm_label(*setting.arm2);
  return label;
}

void validate_setting(const MeasurementSetting& setting) {
  validate_arm(setting.arm1, "arm1");
  if (setting.arm2) validate_arm(*setting.arm2, "arm2");
}

ComplexMatrix waveplate_unitary(Waveplate kind, double theta_deg) {
  const double delta = kind == Waveplate::Half ? std::numbers::pi : std::numbers::pi / 2.0;
  const double theta = radians(theta_deg);
  const ComplexMatrix retard{{1.0, 0.0}, {0.0, std::polar(1.0, delta)}};
  return rotation(-theta) * retard * rotation(theta);
}

ComplexMatrix analyzer_unitary(const ArmSetting& arm) {
  return waveplate_unitary(Waveplate::Half, arm.hwp_deg) *
         waveplate_unitary(Waveplate::Quarter, arm.qwp_deg);
}

std::array<ComplexMatrix, 2> setting_projectors(const ArmSetting& arm) {
  const ComplexMatrix u = analyzer_unitary(arm);
  const ComplexMatrix ud = u.adjoint();
  return {ud * ComplexMatrix::diagonal({1.0, 0.0}) * u, ud * ComplexMatrix::diagonal({0.0, 1.0}) * u};
}

std::vector<ComplexMatrix> measurement_projectors(const MeasurementSetting& setting) {
  const auto first = setting_projectors(setting.arm1);
  if (!setting.arm2) return {first[0], first[1]};
  const auto second = setting_projectors(*setting.arm2);
  std::vector<ComplexMatrix> out;
  out.reserve(4);
  for (const auto& p : first)
    for (const auto& q : second) out.push_back(tensor_product(p, q));
  return out;
}

std::vector<double> outcome_probabilities(const DensityMatrix& rho,
                                          const std::vector<ComplexMatrix>& projectors) {
  if (projectors.empty()) throw Error(ErrorKind::Validation, "empty projector set");
  ComplexMatrix sum(rho.dim());
  for (const auto& p : projectors) {
    if (p.dim() != rho.dim()) {
      throw Error(ErrorKind::InvalidDimension, "projector dimension does not match the state");
    }
    sum += p;
  }
  if (!sum.approx_equal(ComplexMatrix::identity(rho.dim()), kEigTol)) {
    throw Error(ErrorKind::Validation, "projectors do not sum to the identity");
  }
  std::vector<double> probs;
  probs.reserve(projectors.size());
  for (const auto& p : projectors) probs.push_back((rho.matrix() * p).trace().real());
  return probs;
}

std::uint64_t CountRecord::detected() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> CountRecord::frequencies() const {
  if (probabilities) return *probabilities;
  const std::uint64_t n = detected();
  if (n == 0) {
    throw Error(ErrorKind::Validation, "count record for " + setting_label(setting) + " has zero counts");
  }
  std::vector<double> f(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) f[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
  return f;
}

double CountRecord::weight() const noexcept {
  return probabilities ? 1.0 : static_cast<double>(detected());
}

std::uint64_t setting_stream(const MeasurementSetting& setting) {
  char buf[128];
  if (setting.arm2) {
    std::snprintf(buf, sizeof buf, "%.9f,%.9f|%.9f,%.9f", setting.arm1.hwp_deg, setting.arm1.qwp_deg,
                  setting.arm2->hwp_deg, setting.arm2->qwp_deg);
  } else {
    std::snprintf(buf, sizeof buf, "%.9f,%.9f", setting.arm1.hwp_deg, setting.arm1.qwp_deg);
  }
  return fnv1a(buf);
}

CountRecord simulate_counts(const DensityMatrix& rho, const MeasurementSetting& setting,
                            std::uint64_t total_trials, std::uint64_t seed,
                            const SimulationOptions& options) {
  validate_setting(setting);
  if (total_trials == 0) throw Error(ErrorKind::Validation, "total_trials must be at least 1");
  if (!(options.efficiency > 0.0 && options.efficiency <= 1.0)) {
    throw Error(ErrorKind::Validation, "efficiency must lie in (0, 1]");
  }
  if (!(options.background >= 0.0 && options.background <= 1.0)) {
    throw Error(ErrorKind::Validation, "background must lie in [0, 1]");
  }
  const std::size_t n_out = setting.outcome_count();
  if ((n_out == 2 ? 2u : 4u) != rho.dim()) {
    throw Error(ErrorKind::InvalidDimension, "setting " + setting_label(setting) +
                                                 " does not match a state of dim " +
                                                 std::to_string(rho.dim()));
  }
  std::vector<double> probs = outcome_probabilities(rho, measurement_projectors(setting));
  for (double& p : probs) {
    if (p < -kEigTol) {
      throw Error(ErrorKind::NotPsd, "cannot sample from a state with negative outcome probability");
    }
    p = std::max(p, 0.0);
  }
  std::vector<double> cdf(n_out);
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());

  Philox4x32 rng(seed, setting_stream(setting));
  CountRecord rec{setting, std::vector<std::uint64_t>(n_out, 0), total_trials, seed, std::nullopt};
  for (std::uint64_t t = 0; t < total_trials; ++t) {
    if (options.efficiency < 1.0 && rng.uniform() >= options.efficiency) continue;
    std::size_t k;
    if (options.background > 0.0 && rng.uniform() < options.background) {
      k = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_out)), n_out - 1);
    } else {
      const double u = rng.uniform() * cdf.back();
      k = 0;
      while (k + 1 < n_out && u >= cdf[k]) ++k;
    }
    ++rec.counts[k];
  }
  return rec;
}

CountRecord exact_record(const DensityMatrix& rho, const MeasurementSetting& setting) {
  validate_setting(setting);
  return {setting, {}, 1, 0, outcome_probabilities(rho, measurement_projectors(setting))};
}

namespace {

DensityMatrix mixture_state(const MixtureSource& source) {
  if (source.components.empty()) throw Error(ErrorKind::InvalidDistribution, "mixture has no components");
  const std::size_t dim = source.components.front().first.amplitudes.size();
  ComplexMatrix sum(dim);
  double total = 0.0;
  for (std::size_t i = 0; i < source.components.size(); ++i) {
    const auto& [state, w] = source.components[i];
    if (!(w >= 0.0)) {
      std::ostringstream msg;
      msg << "components[" << i << "].weight = " << w << " is negative";
      throw Error(ErrorKind::InvalidDistribution, msg.str());
    }
    if (state.amplitudes.size() != dim) {
      throw Error(ErrorKind::InvalidDimension, "mixture components have different dimensions");
    }
    sum += w * from_pure(state).matrix();
    total += w;
  }
  if (std::abs(total - 1.0) > kEigTol) {
    std::ostringstream msg;
    msg << "components weights sum to " << total << ", expected 1";
    throw Error(ErrorKind::InvalidDistribution, msg.str());
  }
  std::optional<TensorOrder> order;
  if (dim == 4) order = TensorOrder::SignalSecond;
  return DensityMatrix::make(std::move(sum), "classical_mixture", order);
}

DensityMatrix bell_state(const BellPhiPlusSource& source) {
  if (!(source.visibility >= 0.0 && source.visibility <= 1.0)) {
    throw Error(ErrorKind::Validation, "visibility must lie in [0, 1]");
  }
  const double s = 1.0 / std::numbers::sqrt2;
  const ComplexMatrix pure = ComplexMatrix::outer({s, 0.0, 0.0, std::polar(s, source.phase_rad)});
  const ComplexMatrix mixed = ComplexMatrix::diagonal({0.5, 0.0, 0.0, 0.5});
  return DensityMatrix::make(source.visibility * pure + (1.0 - source.visibility) * mixed,
                             "bell_phi_plus", TensorOrder::SignalSecond);
}

}  // namespace

DensityMatrix make_source(const SourceModel& model) {
  struct Visitor {
    DensityMatrix operator()(const PureSource& s) const { return from_pure(s.state, "pure"); }
    DensityMatrix operator()(const MixtureSource& s) const { return mixture_state(s); }
    DensityMatrix operator()(const BellPhiPlusSource& s) const { return bell_state(s); }
    DensityMatrix operator()(const CustomSource& s) const {
      return DensityMatrix::make(s.state.matrix(), s.state.label().empty() ? "custom" : s.state.label(),
                                 s.state.tensor_order());
    }
  };
  return std::visit(Visitor{}, model);
}

}  // namespace polrng
