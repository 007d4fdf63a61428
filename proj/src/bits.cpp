#include "polrng/bits.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>

#include "polrng/error.hpp"
#include "polrng/optics.hpp"
#include "polrng/philox.hpp"

namespace polrng {

BitStream::BitStream(std::vector<std::uint8_t> bytes, std::uint64_t length, Provenance provenance,
                     std::optional<std::uint64_t> seed)
    : bytes_(std::move(bytes)), length_(length), provenance_(provenance), seed_(seed) {
  if (bytes_.size() != (length_ + 7) / 8) {
    throw Error(ErrorKind::Validation, "bit stream payload of " + std::to_string(bytes_.size()) +
                                           " bytes does not match declared length " +
                                           std::to_string(length_));
  }
  // Padding bits past the declared length are always zero.
  if (length_ % 8 != 0) bytes_.back() &= static_cast<std::uint8_t>((1u << (length_ % 8)) - 1u);
}

BitStream BitStream::from_bits(const std::vector<int>& bits, Provenance provenance) {
  BitStream out;
  out.provenance_ = provenance;
  for (int b : bits) out.push_back(b != 0);
  return out;
}

void BitStream::push_back(bool bit) {
  if (length_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (length_ % 8));
  ++length_;
}

std::uint64_t BitStream::count_ones() const noexcept {
  std::uint64_t n = 0;
  for (auto b : bytes_) n += static_cast<std::uint64_t>(std::popcount(b));
  return n;
}

std::string to_string(Provenance provenance) {
  return provenance == Provenance::Simulated ? "simulated" : "external";
}

Provenance provenance_from_string(const std::string& text) {
  if (text == "simulated") return Provenance::Simulated;
  if (text == "external") return Provenance::External;
  throw Error(ErrorKind::Validation, "provenance must be simulated or external, got '" + text + "'");
}

GeneratedBits generate_bits(const DensityMatrix& rho, BitScheme scheme, std::uint64_t n_bits,
                            std::uint64_t seed) {
  Philox4x32 rng(seed, fnv1a("bits/" + to_string(scheme)));
  GeneratedBits out;
  if (scheme == BitScheme::SingleHV) {
    const DensityMatrix bits_state = bit_generating_state(rho, scheme);
    const double p1 = std::clamp(bits_state(1, 1).real(), 0.0, 1.0);
    for (std::uint64_t i = 0; i < n_bits; ++i) out.bits.push_back(rng.uniform() < p1);
  } else {
    if (rho.dim() != 4) {
      throw Error(ErrorKind::InvalidDimension, "coincidence_HH_VV needs a two-photon state");
    }
    auto probs = outcome_probabilities(rho, measurement_projectors(pair_setting(Basis::HV, Basis::HV)));
    for (double& p : probs) {
      if (p < -kEigTol) throw Error(ErrorKind::NotPsd, "HV coincidence probability is negative");
      p = std::max(p, 0.0);
    }
    const double kept = probs[0] + probs[3];
    if (kept <= kEigTol) throw Error(ErrorKind::DegenerateSubspace, "HH and VV have near-zero probability");
    const double c0 = probs[0], c1 = c0 + probs[1], c2 = c1 + probs[2], total = c2 + probs[3];
    while (out.bits.size() < n_bits) {
      const double u = rng.uniform() * total;
      if (u < c0) {
        out.bits.push_back(false);
      } else if (u >= c2) {
        out.bits.push_back(true);
      } else {
        ++out.discarded;
      }
    }
  }
  out.bits.set_origin(Provenance::Simulated, seed);
  return out;
}

BitStream extract_von_neumann(const BitStream& raw) {
  BitStream out;
  for (std::uint64_t i = 0; i + 1 < raw.size(); i += 2) {
    const bool a = raw[i], b = raw[i + 1];
    if (a != b) out.push_back(a);
  }
  out.set_origin(raw.provenance(), raw.seed());
  return out;
}

BitStream toeplitz_seed_bits(std::uint64_t out_len, std::uint64_t raw_len, std::uint64_t seed) {
  BitStream t;
  if (out_len == 0 || raw_len == 0) return t;
  const std::uint64_t n = out_len + raw_len - 1;
  Philox4x32 rng(seed, fnv1a("toeplitz"));
  std::vector<std::uint8_t> bytes((n + 7) / 8);
  for (std::size_t k = 0; k < bytes.size(); k += 8) {
    std::uint64_t word = rng();
    for (std::size_t b = 0; b < 8 && k + b < bytes.size(); ++b, word >>= 8)
      bytes[k + b] = static_cast<std::uint8_t>(word);
  }
  return BitStream(std::move(bytes), n, Provenance::Simulated, seed);
}

namespace {

void check_toeplitz_shape(const BitStream& diagonals, const BitStream& raw, std::uint64_t out_len) {
  if (out_len == 0) return;
  if (diagonals.size() != out_len + raw.size() - 1) {
    throw Error(ErrorKind::InvalidDimension, "Toeplitz diagonal vector must have out_len + n - 1 bits");
  }
}

// 64 bits of `s` starting at bit `offset`, zero past the end.
std::uint64_t window(const BitStream& s, std::uint64_t offset) {
  std::uint64_t w = 0;
  const auto& bytes = s.bytes();
  const std::uint64_t first = offset / 8, shift = offset % 8;
  for (std::uint64_t k = 0; k < 9 && first + k < bytes.size(); ++k) {
    const std::uint64_t byte = bytes[first + k];
    const std::int64_t pos = static_cast<std::int64_t>(8 * k) - static_cast<std::int64_t>(shift);
    if (pos >= 64) break;
    w |= pos >= 0 ? byte << pos : byte >> -pos;
  }
  const std::uint64_t left = offset < s.size() ? s.size() - offset : 0;
  if (left < 64) w &= left == 0 ? 0 : (~std::uint64_t{0} >> (64 - left));
  return w;
}

std::mutex g_fftw_planner;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

BitStream toeplitz_multiply_direct(const BitStream& diagonals, const BitStream& raw, std::uint64_t out_len) {
  check_toeplitz_shape(diagonals, raw, out_len);
  BitStream out;
  if (out_len == 0) return out;
  const std::uint64_t n = raw.size();
  // reversed[j] = raw[n-1-j] turns each output bit into a window dot product.
  BitStream reversed;
  for (std::uint64_t j = 0; j < n; ++j) reversed.push_back(raw[n - 1 - j]);
  for (std::uint64_t i = 0; i < out_len; ++i) {
    std::uint64_t acc = 0;
    for (std::uint64_t j = 0; j < n; j += 64) acc ^= window(diagonals, i + j) & window(reversed, j);
    out.push_back(std::popcount(acc) & 1);
  }
  return out;
}

BitStream toeplitz_multiply(const BitStream& diagonals, const BitStream& raw, std::uint64_t out_len) {
  check_toeplitz_shape(diagonals, raw, out_len);
  const std::uint64_t n = raw.size();
  if (out_len == 0) return {};
  if (out_len * n <= (std::uint64_t{1} << 24)) return toeplitz_multiply_direct(diagonals, raw, out_len);

  // out_i = conv(t, raw)[i + n - 1]. A cyclic length >= out_len + n keeps
  // wrap-around confined to indices below n - 1.
  std::size_t size = 1;
  while (size < out_len + n) size <<= 1;
  const std::size_t half = size / 2 + 1;
  std::unique_ptr<double, FftwFree> a(static_cast<double*>(fftw_malloc(sizeof(double) * size)));
  std::unique_ptr<double, FftwFree> b(static_cast<double*>(fftw_malloc(sizeof(double) * size)));
  std::unique_ptr<fftw_complex, FftwFree> fa(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half)));
  std::unique_ptr<fftw_complex, FftwFree> fb(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half)));

  fftw_plan pa, pb, inv;
  {
    std::lock_guard lock(g_fftw_planner);
    const int sz = static_cast<int>(size);
    pa = fftw_plan_dft_r2c_1d(sz, a.get(), fa.get(), FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(sz, b.get(), fb.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(sz, fa.get(), a.get(), FFTW_ESTIMATE);
  }
  std::fill(a.get(), a.get() + size, 0.0);
  std::fill(b.get(), b.get() + size, 0.0);
  for (std::uint64_t k = 0; k < diagonals.size(); ++k) a.get()[k] = diagonals[k] ? 1.0 : 0.0;
  for (std::uint64_t k = 0; k < n; ++k) b.get()[k] = raw[k] ? 1.0 : 0.0;
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k < half; ++k) {
    const double re = fa.get()[k][0] * fb.get()[k][0] - fa.get()[k][1] * fb.get()[k][1];
    const double im = fa.get()[k][0] * fb.get()[k][1] + fa.get()[k][1] * fb.get()[k][0];
    fa.get()[k][0] = re;
    fa.get()[k][1] = im;
  }
  fftw_execute(inv);
  {
    std::lock_guard lock(g_fftw_planner);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }

  BitStream out;
  const double scale = 1.0 / static_cast<double>(size);
  for (std::uint64_t i = 0; i < out_len; ++i) {
    const auto sum = static_cast<std::uint64_t>(std::llround(a.get()[i + n - 1] * scale));
    out.push_back(sum & 1u);
  }
  return out;
}

BitStream extract_toeplitz(const BitStream& raw, std::uint64_t out_len, std::uint64_t seed,
                           std::uint64_t budget) {
  if (out_len > budget) {
    throw Error(ErrorKind::Budget, "requested " + std::to_string(out_len) +
                                       " output bits exceeds the entropy budget of " +
                                       std::to_string(budget));
  }
  if (out_len == 0) return {};
  if (raw.empty()) throw Error(ErrorKind::Budget, "cannot extract from an empty stream");
  BitStream out = toeplitz_multiply(toeplitz_seed_bits(out_len, raw.size(), seed), raw, out_len);
  out.set_origin(raw.provenance(), seed);
  return out;
}

}  // namespace polrng
