/*
 * LPR / Kyber / Saber PKE
 */

#include <kemfault/pke.hpp>

#include <kemfault/error.hpp>

#include <algorithm>
#include <string>

namespace kemfault {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
   out.push_back(static_cast<std::uint8_t>(v));
   out.push_back(static_cast<std::uint8_t>(v >> 8));
}

Poly reduce_to(const Poly& x, const Modulus& target) {
   Poly r(target);
   for(std::size_t i = 0; i != x.size(); ++i) {
      r.set(i, x[i]);
   }
   return r;
}

std::vector<Poly> identity_matrix(const SchemeParams& params) {
   const Modulus mod = params.modulus();
   std::vector<Poly> a(params.l * params.l, Poly(mod));
   for(std::size_t i = 0; i != params.l; ++i) {
      a[i * params.l + i].set(0, 1);
   }
   return a;
}

/// sum_j A[i][j] * x[j], or the transpose when `transpose` is set
PolyVec mat_vec(const SchemeParams& params, const std::vector<Poly>& a, const PolyVec& x, bool transpose) {
   const std::size_t l = params.l;
   std::vector<Poly> out;
   out.reserve(l);
   for(std::size_t i = 0; i != l; ++i) {
      Poly acc(x.modulus());
      for(std::size_t j = 0; j != l; ++j) {
         acc += poly_mul_negacyclic(x[j], transpose ? a[j * l + i] : a[i * l + j]);
      }
      out.push_back(std::move(acc));
   }
   return PolyVec(std::move(out));
}

PolyVec sample_vec(const SchemeParams& params, const Seed& seed, std::string_view label, unsigned eta) {
   const Modulus mod = params.modulus();
   std::vector<Poly> polys;
   polys.reserve(params.l);
   for(std::size_t i = 0; i != params.l; ++i) {
      polys.push_back(sample_cbd(seed.derive(label, i), eta, mod));
   }
   return PolyVec(std::move(polys));
}

void check_scheme(const SchemeParams& params, SchemeId id) {
   if(params.id != id) {
      throw ParameterError("key belongs to " + std::string(to_string(id)) + ", parameters are " +
                           std::string(params.name()));
   }
}

}  // namespace

Message::Message(std::size_t bits) : m_bits(bits), m_bytes((bits + 7) / 8, 0) {}

Message Message::from_bytes(std::size_t bits, std::span<const std::uint8_t> bytes) {
   Message m(bits);
   if(bytes.size() != m.m_bytes.size()) {
      throw ParameterError("message of " + std::to_string(bits) + " bits needs " + std::to_string(m.m_bytes.size()) +
                           " bytes");
   }
   std::copy(bytes.begin(), bytes.end(), m.m_bytes.begin());
   return m;
}

void Message::set_bit(std::size_t i, bool value) {
   if(i >= m_bits) {
      throw ParameterError("message bit " + std::to_string(i) + " out of range");
   }
   const auto mask = static_cast<std::uint8_t>(1u << (i % 8));
   if(value) {
      m_bytes[i / 8] |= mask;
   } else {
      m_bytes[i / 8] &= static_cast<std::uint8_t>(~mask);
   }
}

bool Message::is_zero() const {
   return std::all_of(m_bytes.begin(), m_bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::vector<std::uint8_t> PublicKey::to_bytes() const {
   std::vector<std::uint8_t> out(seed_a.bytes.begin(), seed_a.bytes.end());
   for(const auto& p : b) {
      for(auto c : p.coeffs()) {
         put_u16(out, c);
      }
   }
   return out;
}

Ciphertext Ciphertext::zero(const SchemeParams& params) {
   Ciphertext ct;
   ct.u.assign(params.l, std::vector<std::uint32_t>(params.n, 0));
   ct.v.assign(params.n, 0);
   return ct;
}

void Ciphertext::validate(const SchemeParams& params) const {
   if(u.size() != params.l) {
      throw ParameterError("ciphertext has " + std::to_string(u.size()) + " u polynomials, expected " +
                           std::to_string(params.l));
   }
   const auto ud = params.u_domain();
   const auto vd = params.v_domain();
   for(const auto& poly : u) {
      if(poly.size() != params.n) {
         throw ParameterError("ciphertext u polynomial has wrong length");
      }
      for(auto c : poly) {
         if(c >= ud) {
            throw ParameterError("ciphertext u coefficient " + std::to_string(c) + " outside [0, " +
                                 std::to_string(ud) + ")");
         }
      }
   }
   if(v.size() != params.n) {
      throw ParameterError("ciphertext v polynomial has wrong length");
   }
   for(auto c : v) {
      if(c >= vd) {
         throw ParameterError("ciphertext v coefficient " + std::to_string(c) + " outside [0, " + std::to_string(vd) +
                              ")");
      }
   }
}

std::vector<std::uint8_t> Ciphertext::to_bytes() const {
   std::vector<std::uint8_t> out;
   out.reserve(2 * (u.size() + 1) * v.size());
   for(const auto& poly : u) {
      for(auto c : poly) {
         put_u16(out, c);
      }
   }
   for(auto c : v) {
      put_u16(out, c);
   }
   return out;
}

std::vector<Poly> expand_matrix(const SchemeParams& params, const Seed& seed_a) {
   const Modulus mod = params.modulus();
   std::vector<Poly> a;
   a.reserve(params.l * params.l);
   for(std::size_t i = 0; i != params.l * params.l; ++i) {
      a.push_back(sample_uniform(seed_a.derive("A", i), mod));
   }
   return a;
}

KeyPair pke_keygen(const SchemeParams& params, const Seed& seed, const KeygenOptions& opts) {
   const Seed seed_a = seed.derive("seed_a");
   std::vector<Poly> a = opts.identity_matrix ? identity_matrix(params) : expand_matrix(params, seed_a);

   PolyVec s = sample_vec(params, seed, "s", params.eta1);
   PolyVec as = mat_vec(params, a, s, false);

   if(params.family == Family::saber) {
      const Modulus mod_p(params.p, params.n);
      std::vector<Poly> b;
      for(const auto& t : as) {
         Poly bi(mod_p);
         for(std::size_t k = 0; k != params.n; ++k) {
            bi.set(k, shift_round(t[k], params.eps_q, params.eps_p));
         }
         b.push_back(std::move(bi));
      }
      return KeyPair{PublicKey{params.id, seed_a, std::move(a), PolyVec(std::move(b))}, SecretKey{params.id, s}};
   }

   if(!opts.zero_error) {
      const PolyVec e = sample_vec(params, seed, "e", params.eta1);
      for(std::size_t i = 0; i != params.l; ++i) {
         as[i] += e[i];
      }
   }
   return KeyPair{PublicKey{params.id, seed_a, std::move(a), std::move(as)}, SecretKey{params.id, s}};
}

Ciphertext pke_enc(const SchemeParams& params, const PublicKey& pk, const Message& m, const Seed& coins) {
   check_scheme(params, pk.scheme);
   if(m.bits() != params.n) {
      throw ParameterError("message has " + std::to_string(m.bits()) + " bits, ring degree is " +
                           std::to_string(params.n));
   }
   const Modulus mod = params.modulus();
   Ciphertext ct;

   if(params.family == Family::saber) {
      const Modulus mod_p(params.p, params.n);
      const PolyVec r = sample_vec(params, coins, "r", params.mu);
      const PolyVec ar = mat_vec(params, pk.a, r, true);
      for(const auto& poly : ar) {
         std::vector<std::uint32_t> c(params.n);
         for(std::size_t k = 0; k != params.n; ++k) {
            c[k] = shift_round(poly[k], params.eps_q, params.eps_p);
         }
         ct.u.push_back(std::move(c));
      }

      Poly vp(mod_p);
      for(std::size_t i = 0; i != params.l; ++i) {
         vp += poly_mul_negacyclic(reduce_to(r[i], mod_p), pk.b[i]);
      }
      const unsigned shift = params.eps_p - params.eps_T;
      const std::int64_t half = std::int64_t(1) << (params.eps_p - 1);
      ct.v.resize(params.n);
      for(std::size_t k = 0; k != params.n; ++k) {
         const std::uint32_t x = mod_p.reduce(std::int64_t(vp[k]) + params.h1 - (m.bit(k) ? half : 0));
         ct.v[k] = x >> shift;
      }
      return ct;
   }

   const PolyVec r = sample_vec(params, coins, "r", params.eta1);
   const PolyVec e1 = sample_vec(params, coins, "e1", params.eta2);
   const Poly e2 = sample_cbd(coins.derive("e2"), params.eta2, mod);

   PolyVec u = mat_vec(params, pk.a, r, true);
   Poly v = inner_product(r, pk.b);
   v += e2;
   const std::uint32_t offset = params.q / 2;
   for(std::size_t k = 0; k != params.n; ++k) {
      if(m.bit(k)) {
         v.set(k, std::int64_t(v[k]) + offset);
      }
   }

   const bool compressed = params.family == Family::kyber;
   for(std::size_t i = 0; i != params.l; ++i) {
      u[i] += e1[i];
      std::vector<std::uint32_t> c(u[i].coeffs().begin(), u[i].coeffs().end());
      if(compressed) {
         for(auto& x : c) {
            x = compress(x, params.du, mod);
         }
      }
      ct.u.push_back(std::move(c));
   }
   ct.v.assign(v.coeffs().begin(), v.coeffs().end());
   if(compressed) {
      for(auto& x : ct.v) {
         x = compress(x, params.dv, mod);
      }
   }
   return ct;
}

std::vector<std::uint32_t> pke_dec_accumulated(const SchemeParams& params,
                                               const SecretKey& sk,
                                               const Ciphertext& ct) {
   check_scheme(params, sk.scheme);
   ct.validate(params);

   if(params.family == Family::saber) {
      const Modulus mod_p(params.p, params.n);
      Poly acc(mod_p);
      for(std::size_t i = 0; i != params.l; ++i) {
         acc += poly_mul_negacyclic(Poly(mod_p, ct.u[i]), reduce_to(sk.s[i], mod_p));
      }
      const std::int64_t scale = std::int64_t(1) << (params.eps_p - params.eps_T);
      std::vector<std::uint32_t> out(params.n);
      for(std::size_t k = 0; k != params.n; ++k) {
         out[k] = mod_p.reduce(std::int64_t(acc[k]) - scale * ct.v[k] + params.h2);
      }
      return out;
   }

   const Modulus mod = params.modulus();
   const bool compressed = params.family == Family::kyber;
   Poly w(mod);
   for(std::size_t i = 0; i != params.l; ++i) {
      std::vector<std::uint32_t> c = ct.u[i];
      if(compressed) {
         for(auto& x : c) {
            x = decompress(x, params.du, mod);
         }
      }
      w += poly_mul_negacyclic(Poly(mod, std::move(c)), sk.s[i]);
   }
   std::vector<std::uint32_t> out(params.n);
   for(std::size_t k = 0; k != params.n; ++k) {
      const std::uint32_t vk = compressed ? decompress(ct.v[k], params.dv, mod) : ct.v[k];
      out[k] = mod.reduce(std::int64_t(vk) - w[k]);
   }
   return out;
}

Message pke_dec(const SchemeParams& params, const SecretKey& sk, const Ciphertext& ct) {
   const auto acc = pke_dec_accumulated(params, sk, ct);
   Message m(params.n);
   for(std::size_t k = 0; k != params.n; ++k) {
      m.set_bit(k, decode_bit(params, acc[k]) != 0);
   }
   return m;
}

std::uint8_t decode_bit(const SchemeParams& params, std::uint32_t accumulated) {
   if(params.family == Family::saber) {
      return static_cast<std::uint8_t>((accumulated % params.p) >> (params.eps_p - 1));
   }
   const Modulus mod = params.modulus();
   return static_cast<std::uint8_t>(compress(accumulated % params.q, 1, mod));
}

}  // namespace kemfault
