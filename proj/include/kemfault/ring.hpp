/*
 * Arithmetic in Z_q[x]/(x^n + 1) and the coefficient compression maps
 * used by the LPR-family schemes.
 */

#ifndef KEMFAULT_RING_HPP_
#define KEMFAULT_RING_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace kemfault {

/// Ring modulus q together with the ring degree n.
class Modulus {
   public:
      Modulus(std::uint32_t q, std::size_t n);

      std::uint32_t q() const { return m_q; }

      std::size_t n() const { return m_n; }

      /// Number of bits needed to write q - 1.
      unsigned bit_length() const;

      bool is_power_of_two() const { return (m_q & (m_q - 1)) == 0; }

      std::uint32_t reduce(std::int64_t x) const {
         const std::int64_t r = x % static_cast<std::int64_t>(m_q);
         return static_cast<std::uint32_t>(r < 0 ? r + m_q : r);
      }

      /// Signed representative in (-q/2, q/2].
      std::int32_t centered(std::uint32_t x) const {
         const auto v = static_cast<std::int32_t>(x);
         return v > static_cast<std::int32_t>(m_q / 2) ? v - static_cast<std::int32_t>(m_q) : v;
      }

      bool operator==(const Modulus& other) const = default;

   private:
      std::uint32_t m_q;
      std::size_t m_n;
};

/// Ring element with every coefficient kept in [0, q).
class Poly {
   public:
      explicit Poly(const Modulus& m);
      Poly(const Modulus& m, std::vector<std::uint32_t> coeffs);

      static Poly from_signed(const Modulus& m, std::span<const std::int32_t> values);
      static Poly from_signed(const Modulus& m, std::initializer_list<std::int32_t> values);

      const Modulus& modulus() const { return m_mod; }

      std::size_t size() const { return m_coeffs.size(); }

      std::uint32_t operator[](std::size_t i) const { return m_coeffs[i]; }

      std::span<const std::uint32_t> coeffs() const { return m_coeffs; }

      void set(std::size_t i, std::int64_t value) { m_coeffs[i] = m_mod.reduce(value); }

      std::int32_t centered(std::size_t i) const { return m_mod.centered(m_coeffs[i]); }

      std::vector<std::int32_t> to_signed() const;

      Poly& operator+=(const Poly& other);
      Poly& operator-=(const Poly& other);

      friend Poly operator+(Poly a, const Poly& b) { return a += b; }

      friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

      Poly operator-() const;

      bool operator==(const Poly& other) const = default;

   private:
      Modulus m_mod;
      std::vector<std::uint32_t> m_coeffs;
};

/// Fixed-length vector of ring elements sharing one modulus.
class PolyVec {
   public:
      PolyVec(const Modulus& m, std::size_t l);
      explicit PolyVec(std::vector<Poly> polys);

      std::size_t size() const { return m_polys.size(); }

      const Modulus& modulus() const { return m_polys.front().modulus(); }

      Poly& operator[](std::size_t i) { return m_polys[i]; }

      const Poly& operator[](std::size_t i) const { return m_polys[i]; }

      auto begin() const { return m_polys.begin(); }

      auto end() const { return m_polys.end(); }

      bool operator==(const PolyVec& other) const = default;

   private:
      std::vector<Poly> m_polys;
};

/// Schoolbook product reduced modulo (x^n + 1, q).
Poly poly_mul_negacyclic(const Poly& a, const Poly& b);

/// sum_i a[i] * b[i]
Poly inner_product(const PolyVec& a, const PolyVec& b);

/// round(2^d * x / q) mod 2^d, ties rounded up.
std::uint32_t compress(std::uint32_t x, unsigned d, const Modulus& m);

/// round(q * y / 2^d), ties rounded up.
std::uint32_t decompress(std::uint32_t y, unsigned d, const Modulus& m);

/// (x + 2^(from-to-1)) >> (from-to), reduced mod 2^to.
std::uint32_t shift_round(std::uint32_t x, unsigned from_bits, unsigned to_bits);

}  // namespace kemfault

#endif
