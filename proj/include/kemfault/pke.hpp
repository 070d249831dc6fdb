/*
 * CPA-secure LPR, Kyber and Saber public-key encryption
 */

#ifndef KEMFAULT_PKE_HPP_
#define KEMFAULT_PKE_HPP_

#include <kemfault/params.hpp>
#include <kemfault/ring.hpp>
#include <kemfault/symmetric.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace kemfault {

/// An n-bit plaintext, bit i stored at bit (i % 8) of byte i / 8.
class Message {
   public:
      explicit Message(std::size_t bits = 256);

      static Message from_bytes(std::size_t bits, std::span<const std::uint8_t> bytes);

      std::size_t bits() const { return m_bits; }

      bool bit(std::size_t i) const { return (m_bytes[i / 8] >> (i % 8)) & 1; }

      void set_bit(std::size_t i, bool value);

      std::span<const std::uint8_t> bytes() const { return m_bytes; }

      bool is_zero() const;

      bool operator==(const Message& other) const = default;

   private:
      std::size_t m_bits;
      std::vector<std::uint8_t> m_bytes;
};

struct PublicKey {
      SchemeId scheme;
      Seed seed_a;
      /// Row-major l x l matrix expanded from seed_a.
      std::vector<Poly> a;
      /// Kyber and LPR: mod q. Saber: mod p.
      PolyVec b;

      const Poly& a_at(std::size_t row, std::size_t col) const { return a[row * b.size() + col]; }

      /// seed_a followed by the coefficients of b, 16-bit little endian.
      std::vector<std::uint8_t> to_bytes() const;
};

struct SecretKey {
      SchemeId scheme;
      PolyVec s;
};

struct KeyPair {
      PublicKey pk;
      SecretKey sk;
};

/// Transmitted ciphertext, coefficients already in the compressed domains.
struct Ciphertext {
      std::vector<std::vector<std::uint32_t>> u;
      std::vector<std::uint32_t> v;

      /// All-zero ciphertext of the right shape.
      static Ciphertext zero(const SchemeParams& params);

      /// Throws ParameterError on wrong shape or out-of-range coefficients.
      void validate(const SchemeParams& params) const;

      /// u coefficients then v coefficients, 16-bit little endian.
      std::vector<std::uint8_t> to_bytes() const;

      bool operator==(const Ciphertext& other) const = default;
};

/// Test hooks for degenerate key generation.
struct KeygenOptions {
      bool zero_error = false;
      bool identity_matrix = false;
};

/// Row-major l x l uniform matrix derived from a public seed.
std::vector<Poly> expand_matrix(const SchemeParams& params, const Seed& seed_a);

KeyPair pke_keygen(const SchemeParams& params, const Seed& seed, const KeygenOptions& opts = {});

Ciphertext pke_enc(const SchemeParams& params, const PublicKey& pk, const Message& m, const Seed& coins);

/// Per-coefficient value fed to decode_bit.
std::vector<std::uint32_t> pke_dec_accumulated(const SchemeParams& params,
                                               const SecretKey& sk,
                                               const Ciphertext& ct);

Message pke_dec(const SchemeParams& params, const SecretKey& sk, const Ciphertext& ct);

/// Kyber / LPR: 1 iff the value mod q lies in (q/4, 3q/4). Saber: value >> (eps_p - 1).
std::uint8_t decode_bit(const SchemeParams& params, std::uint32_t accumulated);

}  // namespace kemfault

#endif
