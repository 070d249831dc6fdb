/*
 * SHA-3 / SHAKE primitives, seeds and the deterministic byte streams
 * used for sampling.
 */

#ifndef KEMFAULT_SYMMETRIC_HPP_
#define KEMFAULT_SYMMETRIC_HPP_

#include <kemfault/ring.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kemfault {

using Digest32 = std::array<std::uint8_t, 32>;
using Digest64 = std::array<std::uint8_t, 64>;

void shake128(std::span<const std::uint8_t> in, std::span<std::uint8_t> out);
void shake256(std::span<const std::uint8_t> in, std::span<std::uint8_t> out);
Digest32 sha3_256(std::span<const std::uint8_t> in);
Digest64 sha3_512(std::span<const std::uint8_t> in);

/// 32 bytes feeding every pseudorandom stream in the library.
struct Seed {
      std::array<std::uint8_t, 32> bytes{};

      /// Seed whose bytes are SHAKE256 of the little-endian value.
      static Seed from_u64(std::uint64_t value);

      /// Independent child seed for a labelled purpose.
      Seed derive(std::string_view label, std::uint64_t index = 0) const;

      bool operator==(const Seed&) const = default;
};

/// SHAKE128 output read sequentially. Running past the buffered prefix
/// squeezes a longer output, which extends the same stream.
class XofStream {
   public:
      explicit XofStream(std::span<const std::uint8_t> input, std::size_t initial = 512);

      std::uint8_t next_byte();
      std::uint32_t next_u32();

   private:
      std::vector<std::uint8_t> m_input;
      std::vector<std::uint8_t> m_buffer;
      std::size_t m_pos = 0;
};

/// Each coefficient is (sum of eta bits) - (sum of eta bits), reduced mod q.
/// Bits are taken from SHAKE256(seed) in little-endian bit order.
Poly sample_cbd(const Seed& seed, unsigned eta, const Modulus& m);

/// Uniform coefficients in [0, q) by rejection on SHAKE128(seed).
Poly sample_uniform(const Seed& seed, const Modulus& m);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace kemfault

#endif
