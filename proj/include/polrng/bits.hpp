#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polrng/randomness.hpp"
#include "polrng/state.hpp"

namespace polrng {

enum class Provenance { Simulated, External };

// Packed bit sequence; bit i lives in byte i/8 at position i%8 (LSB first).
class BitStream {
 public:
  BitStream() = default;
  BitStream(std::vector<std::uint8_t> bytes, std::uint64_t length, Provenance provenance,
            std::optional<std::uint64_t> seed = std::nullopt);
  static BitStream from_bits(const std::vector<int>& bits, Provenance provenance = Provenance::External);

  std::uint64_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  bool operator[](std::uint64_t i) const noexcept { return (bytes_[i >> 3] >> (i & 7)) & 1u; }
  void push_back(bool bit);
  std::uint64_t count_ones() const noexcept;

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  Provenance provenance() const noexcept { return provenance_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  void set_origin(Provenance provenance, std::optional<std::uint64_t> seed) {
    provenance_ = provenance;
    seed_ = seed;
  }

  friend bool operator==(const BitStream&, const BitStream&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t length_ = 0;
  Provenance provenance_ = Provenance::External;
  std::optional<std::uint64_t> seed_;
};

std::string to_string(Provenance provenance);
Provenance provenance_from_string(const std::string& text);

struct GeneratedBits {
  BitStream bits;
  // Coincidence events outside HH/VV drawn and dropped while producing `bits`.
  std::uint64_t discarded = 0;
};

// Born-rule bit generation: bit 1 is V (single_HV) or VV (coincidence).
GeneratedBits generate_bits(const DensityMatrix& rho, BitScheme scheme, std::uint64_t n_bits,
                            std::uint64_t seed);

// Pairs 01 -> 0, 10 -> 1, 00/11 dropped.
BitStream extract_von_neumann(const BitStream& raw);

// out = T raw over GF(2), with T an out_len x raw.size() Toeplitz matrix
// whose out_len + raw.size() - 1 defining bits come from `seed`.
// `budget` is the caller's entropy budget; exceeding it throws Budget.
BitStream extract_toeplitz(const BitStream& raw, std::uint64_t out_len, std::uint64_t seed,
                           std::uint64_t budget);

// The defining diagonal bits of the seeded Toeplitz matrix: entry (i, j)
// equals bit (i - j + n - 1).
BitStream toeplitz_seed_bits(std::uint64_t out_len, std::uint64_t raw_len, std::uint64_t seed);

// GF(2) product with an explicit diagonal vector. Uses FFT convolution for
// large inputs and a direct word-level product otherwise.
BitStream toeplitz_multiply(const BitStream& diagonals, const BitStream& raw, std::uint64_t out_len);
BitStream toeplitz_multiply_direct(const BitStream& diagonals, const BitStream& raw, std::uint64_t out_len);

}  // namespace polrng
