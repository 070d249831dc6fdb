/*
 * Arithmetic in Z_q[x]/(x^n + 1)
 */

#include <kemfault/ring.hpp>

#include <kemfault/error.hpp>

#include <bit>
#include <string>

namespace kemfault {

Modulus::Modulus(std::uint32_t q, std::size_t n) : m_q(q), m_n(n) {
   if(q <= 2) {
      throw ParameterError("modulus q must exceed 2, got " + std::to_string(q));
   }
   if(q > (1u << 24)) {
      throw ParameterError("modulus q above 2^24 is not supported");
   }
   if(n == 0 || !std::has_single_bit(n)) {
      throw ParameterError("ring degree must be a power of two, got " + std::to_string(n));
   }
}

unsigned Modulus::bit_length() const {
   return static_cast<unsigned>(std::bit_width(m_q - 1));
}

Poly::Poly(const Modulus& m) : m_mod(m), m_coeffs(m.n(), 0) {}

Poly::Poly(const Modulus& m, std::vector<std::uint32_t> coeffs) : m_mod(m), m_coeffs(std::move(coeffs)) {
   if(m_coeffs.size() != m.n()) {
      throw ParameterError("polynomial has " + std::to_string(m_coeffs.size()) + " coefficients, ring degree is " +
                           std::to_string(m.n()));
   }
   for(auto c : m_coeffs) {
      if(c >= m.q()) {
         throw ParameterError("coefficient " + std::to_string(c) + " is not reduced mod " + std::to_string(m.q()));
      }
   }
}

Poly Poly::from_signed(const Modulus& m, std::span<const std::int32_t> values) {
   if(values.size() != m.n()) {
      throw ParameterError("polynomial has " + std::to_string(values.size()) + " coefficients, ring degree is " +
                           std::to_string(m.n()));
   }
   Poly p(m);
   for(std::size_t i = 0; i != values.size(); ++i) {
      p.set(i, values[i]);
   }
   return p;
}

Poly Poly::from_signed(const Modulus& m, std::initializer_list<std::int32_t> values) {
   return from_signed(m, std::span<const std::int32_t>(values.begin(), values.size()));
}

std::vector<std::int32_t> Poly::to_signed() const {
   std::vector<std::int32_t> out(m_coeffs.size());
   for(std::size_t i = 0; i != out.size(); ++i) {
      out[i] = m_mod.centered(m_coeffs[i]);
   }
   return out;
}

Poly& Poly::operator+=(const Poly& other) {
   if(!(m_mod == other.m_mod)) {
      throw ParameterError("adding polynomials over different rings");
   }
   const auto q = m_mod.q();
   for(std::size_t i = 0; i != m_coeffs.size(); ++i) {
      const auto s = m_coeffs[i] + other.m_coeffs[i];
      m_coeffs[i] = s >= q ? s - q : s;
   }
   return *this;
}

Poly& Poly::operator-=(const Poly& other) {
   if(!(m_mod == other.m_mod)) {
      throw ParameterError("subtracting polynomials over different rings");
   }
   const auto q = m_mod.q();
   for(std::size_t i = 0; i != m_coeffs.size(); ++i) {
      m_coeffs[i] = m_coeffs[i] >= other.m_coeffs[i] ? m_coeffs[i] - other.m_coeffs[i]
                                                      : m_coeffs[i] + q - other.m_coeffs[i];
   }
   return *this;
}

Poly Poly::operator-() const {
   Poly r(m_mod);
   for(std::size_t i = 0; i != m_coeffs.size(); ++i) {
      r.m_coeffs[i] = m_coeffs[i] == 0 ? 0 : m_mod.q() - m_coeffs[i];
   }
   return r;
}

PolyVec::PolyVec(const Modulus& m, std::size_t l) : m_polys(l, Poly(m)) {
   if(l == 0) {
      throw ParameterError("polynomial vector must not be empty");
   }
}

PolyVec::PolyVec(std::vector<Poly> polys) : m_polys(std::move(polys)) {
   if(m_polys.empty()) {
      throw ParameterError("polynomial vector must not be empty");
   }
   for(const auto& p : m_polys) {
      if(!(p.modulus() == m_polys.front().modulus())) {
         throw ParameterError("polynomial vector mixes moduli");
      }
   }
}

Poly poly_mul_negacyclic(const Poly& a, const Poly& b) {
   if(!(a.modulus() == b.modulus())) {
      throw ParameterError("multiplying polynomials over different rings");
   }
   const std::size_t n = a.size();
   const auto ac = a.coeffs();
   const auto bc = b.coeffs();

   // Products stay below 2^48 and at most n <= 2^15 of them accumulate.
   std::vector<std::int64_t> acc(n, 0);
   for(std::size_t i = 0; i != n; ++i) {
      const std::int64_t ai = ac[i];
      if(ai == 0) {
         continue;
      }
      std::int64_t* lo = acc.data() + i;
      for(std::size_t j = 0; j != n - i; ++j) {
         lo[j] += ai * bc[j];
      }
      const std::uint32_t* hi = bc.data() + (n - i);
      for(std::size_t k = 0; k != i; ++k) {
         acc[k] -= ai * hi[k];
      }
   }

   Poly r(a.modulus());
   for(std::size_t i = 0; i != n; ++i) {
      r.set(i, acc[i]);
   }
   return r;
}

Poly inner_product(const PolyVec& a, const PolyVec& b) {
   if(a.size() != b.size()) {
      throw ParameterError("inner product of vectors with different lengths");
   }
   Poly acc(a.modulus());
   for(std::size_t i = 0; i != a.size(); ++i) {
      acc += poly_mul_negacyclic(a[i], b[i]);
   }
   return acc;
}

std::uint32_t compress(std::uint32_t x, unsigned d, const Modulus& m) {
   if(d == 0 || d >= m.bit_length()) {
      throw ParameterError("compression width " + std::to_string(d) + " invalid for q = " + std::to_string(m.q()));
   }
   if(x >= m.q()) {
      throw ParameterError("compress input not reduced");
   }
   const std::uint64_t q = m.q();
   // floor(2^d x / q + 1/2)
   const std::uint64_t r = ((static_cast<std::uint64_t>(x) << (d + 1)) + q) / (2 * q);
   return static_cast<std::uint32_t>(r & ((std::uint64_t(1) << d) - 1));
}

std::uint32_t decompress(std::uint32_t y, unsigned d, const Modulus& m) {
   if(d == 0 || d >= m.bit_length()) {
      throw ParameterError("compression width " + std::to_string(d) + " invalid for q = " + std::to_string(m.q()));
   }
   if(y >= (1u << d)) {
      throw ParameterError("decompress input " + std::to_string(y) + " exceeds " + std::to_string(d) + " bits");
   }
   // floor(q y / 2^d + 1/2)
   const std::uint64_t r = (2 * static_cast<std::uint64_t>(m.q()) * y + (std::uint64_t(1) << d)) >> (d + 1);
   return static_cast<std::uint32_t>(r);
}

std::uint32_t shift_round(std::uint32_t x, unsigned from_bits, unsigned to_bits) {
   if(from_bits <= to_bits || from_bits > 31) {
      throw ParameterError("shift_round needs from_bits > to_bits");
   }
   const unsigned shift = from_bits - to_bits;
   const std::uint64_t r = (static_cast<std::uint64_t>(x) + (std::uint64_t(1) << (shift - 1))) >> shift;
   return static_cast<std::uint32_t>(r & ((std::uint64_t(1) << to_bits) - 1));
}

}  // namespace kemfault
