#include "polrng/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polrng/error.hpp"
#include "polrng/philox.hpp"
#include "polrng/randomness.hpp"

namespace polrng {

namespace {

// Outcome 0 of every canonical basis is the +1 eigenstate (H, D, R).
constexpr double sign_of(std::size_t outcome) { return outcome == 0 ? 1.0 : -1.0; }

const CountRecord* find_record(const std::vector<CountRecord>& records, const MeasurementSetting& wanted) {
  for (const auto& r : records) {
    if (r.setting.arm2.has_value() != wanted.arm2.has_value()) continue;
    if (basis_of(r.setting.arm1) != basis_of(wanted.arm1)) continue;
    if (wanted.arm2 && basis_of(*r.setting.arm2) != basis_of(*wanted.arm2)) continue;
    return &r;
  }
  return nullptr;
}

void require_complete(const std::vector<CountRecord>& records, std::size_t dim) {
  const auto missing = missing_settings(records, dim);
  if (missing.empty()) return;
  std::string list;
  for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
  throw Error(ErrorKind::MissingSetting, "missing settings: " + list);
}

}  // namespace

int pauli_axis(Basis basis) {
  switch (basis) {
    case Basis::DA: return 1;
    case Basis::RL: return 2;
    case Basis::HV: return 3;
  }
  return 0;
}

std::vector<MeasurementSetting> tomography_settings(std::size_t dim) {
  std::vector<MeasurementSetting> out;
  if (dim == 2) {
    for (Basis b : kAllBases) out.push_back(single_setting(b));
  } else if (dim == 4) {
    for (Basis a : kAllBases)
      for (Basis b : kAllBases) out.push_back(pair_setting(a, b));
  } else {
    throw Error(ErrorKind::InvalidDimension, "tomography supports dim 2 or 4");
  }
  return out;
}

std::vector<std::string> missing_settings(const std::vector<CountRecord>& records, std::size_t dim) {
  std::vector<std::string> missing;
  for (const auto& s : tomography_settings(dim))
    if (!find_record(records, s)) missing.push_back(setting_label(s));
  return missing;
}

StokesVector stokes_from_counts_single(const std::vector<CountRecord>& records) {
  require_complete(records, 2);
  StokesVector s{{1.0, 0.0, 0.0, 0.0}};
  for (Basis b : kAllBases) {
    const auto f = find_record(records, single_setting(b))->frequencies();
    s.values[pauli_axis(b)] = f[0] - f[1];
  }
  return s;
}

StokesVector stokes_from_counts_two(const std::vector<CountRecord>& records) {
  require_complete(records, 4);
  StokesVector s{std::vector<double>(16, 0.0)};
  s.values[0] = 1.0;
  std::array<double, 4> marg1{}, weight1{}, marg2{}, weight2{};
  for (Basis a : kAllBases) {
    for (Basis b : kAllBases) {
      const CountRecord& rec = *find_record(records, pair_setting(a, b));
      const auto f = rec.frequencies();
      const int i = pauli_axis(a), j = pauli_axis(b);
      double corr = 0.0, m1 = 0.0, m2 = 0.0;
      for (std::size_t o1 = 0; o1 < 2; ++o1)
        for (std::size_t o2 = 0; o2 < 2; ++o2) {
          const double p = f[2 * o1 + o2];
          corr += sign_of(o1) * sign_of(o2) * p;
          m1 += sign_of(o1) * p;
          m2 += sign_of(o2) * p;
        }
      s.values[4 * i + j] = corr;
      const double w = rec.weight();
      marg1[i] += w * m1;
      weight1[i] += w;
      marg2[j] += w * m2;
      weight2[j] += w;
    }
  }
  for (int k = 1; k < 4; ++k) {
    s.values[4 * k] = marg1[k] / weight1[k];
    s.values[k] = marg2[k] / weight2[k];
  }
  return s;
}

ComplexMatrix reconstruct_single(const StokesVector& s) {
  if (s.values.size() != 4) throw Error(ErrorKind::InvalidDimension, "single-photon Stokes vector needs 4 values");
  ComplexMatrix rho(2);
  for (int i = 0; i < 4; ++i) rho += (0.5 * s[i]) * pauli(i);
  return rho;
}

ComplexMatrix reconstruct_two(const StokesVector& s) {
  if (s.values.size() != 16) throw Error(ErrorKind::InvalidDimension, "two-photon Stokes vector needs 16 values");
  ComplexMatrix rho(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho += (0.25 * s.at(i, j)) * tensor_product(pauli(i), pauli(j));
  return rho;
}

std::vector<double> truncate_spectrum(const std::vector<double>& eigenvalues) {
  const std::size_t n = eigenvalues.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

  // Walk up from the smallest eigenvalue, zeroing each one that would stay
  // negative after the accumulated deficit is shared over the rest.
  std::vector<double> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = eigenvalues[order[k]];
  double deficit = 0.0;
  std::size_t keep = n;
  while (keep > 0) {
    const double shifted = sorted[keep - 1] + deficit / static_cast<double>(keep);
    // Values that land on zero up to round-off are zeroed too.
    if (shifted > 1e-14) break;
    deficit += sorted[keep - 1];
    sorted[keep - 1] = 0.0;
    --keep;
  }
  for (std::size_t k = 0; k < keep; ++k) sorted[k] += deficit / static_cast<double>(keep);

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[order[k]] = sorted[k];
  return out;
}

DensityMatrix project_to_physical(const ComplexMatrix& raw, std::string label) {
  if (!raw.is_hermitian(kEigTol)) throw Error(ErrorKind::Validation, "projection input is not Hermitian");
  if (std::abs(raw.trace() - Complex(1.0)) > kEigTol) {
    throw Error(ErrorKind::Validation, "projection input does not have unit trace");
  }
  const auto eig = hermitian_eig(raw);
  if (eig.eigenvalues.front() >= 0.0) {
    // Already physical; leave the matrix untouched.
    std::optional<TensorOrder> order;
    if (raw.dim() == 4) order = TensorOrder::SignalSecond;
    return DensityMatrix::make(raw, std::move(label), order);
  }
  const auto clipped = truncate_spectrum(eig.eigenvalues);
  ComplexMatrix m = eig.vectors * ComplexMatrix::diagonal(clipped) * eig.vectors.adjoint();
  m = 0.5 * (m + m.adjoint());
  std::optional<TensorOrder> order;
  if (m.dim() == 4) order = TensorOrder::SignalSecond;
  return DensityMatrix::make(std::move(m), std::move(label), order);
}

Reconstruction reconstruct(const std::vector<CountRecord>& records, std::size_t dim) {
  StokesVector s = dim == 2 ? stokes_from_counts_single(records) : stokes_from_counts_two(records);
  ComplexMatrix raw = dim == 2 ? reconstruct_single(s) : reconstruct_two(s);
  auto raw_eig = hermitian_eig(raw).eigenvalues;
  DensityMatrix projected = project_to_physical(raw);
  auto proj_eig = hermitian_eig(projected.matrix()).eigenvalues;
  return {std::move(s), std::move(raw), std::move(raw_eig), std::move(projected), std::move(proj_eig)};
}

namespace {

IntervalStats summarize(std::vector<double> values) {
  IntervalStats st;
  const double n = static_cast<double>(values.size());
  st.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - st.mean) * (v - st.mean);
  st.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  st.lower = quantile(0.025);
  st.upper = quantile(0.975);
  return st;
}

CountRecord resample_record(const CountRecord& rec, Philox4x32& rng) {
  const auto f = rec.frequencies();
  std::vector<double> cdf(f.size());
  std::partial_sum(f.begin(), f.end(), cdf.begin());
  CountRecord out{rec.setting, std::vector<std::uint64_t>(f.size(), 0), rec.total_trials, rec.seed, std::nullopt};
  const std::uint64_t n = rec.detected();
  for (std::uint64_t t = 0; t < n; ++t) {
    const double u = rng.uniform() * cdf.back();
    std::size_t k = 0;
    while (k + 1 < f.size() && u >= cdf[k]) ++k;
    ++out.counts[k];
  }
  return out;
}

}  // namespace

BootstrapResult bootstrap_uncertainty(const std::vector<CountRecord>& records, std::size_t dim,
                                      const BootstrapOptions& options) {
  if (options.resamples < 100) throw Error(ErrorKind::Validation, "bootstrap needs at least 100 resamples");
  require_complete(records, dim);
  if (options.resample) {
    for (const auto& r : records)
      if (r.probabilities) {
        throw Error(ErrorKind::Validation, "cannot resample an exact-probability record");
      }
  }

  const std::size_t n_entries = dim * dim;
  std::vector<std::vector<double>> re(n_entries), im(n_entries);
  std::vector<double> cs, hs, fs;
  for (std::size_t b = 0; b < options.resamples; ++b) {
    std::vector<CountRecord> sample;
    sample.reserve(records.size());
    // One stream per resample keeps results independent of evaluation order.
    Philox4x32 rng(options.seed, b);
    for (const auto& r : records) sample.push_back(options.resample ? resample_record(r, rng) : r);

    const Reconstruction rec = reconstruct(sample, dim);
    const auto& m = rec.projected.matrix();
    for (std::size_t k = 0; k < n_entries; ++k) {
      re[k].push_back(m.entries()[k].real());
      im[k].push_back(m.entries()[k].imag());
    }
    const double c = dim == 2 ? coherence(rec.projected) : coherence(subspace_restrict(rec.projected, {0, 3}));
    cs.push_back(c);
    hs.push_back(min_entropy_bound(c));
    if (options.target) fs.push_back(fidelity(rec.projected, *options.target, options.convention));
  }

  BootstrapResult out;
  out.resamples = options.resamples;
  for (std::size_t k = 0; k < n_entries; ++k) {
    out.entry_std_real.push_back(summarize(re[k]).stddev);
    out.entry_std_imag.push_back(summarize(im[k]).stddev);
  }
  out.coherence = summarize(cs);
  out.min_entropy_bound = summarize(hs);
  if (options.target) out.fidelity = summarize(fs);
  return out;
}

}  // namespace polrng
