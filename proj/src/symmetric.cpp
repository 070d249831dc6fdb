/*
 * SHA-3 / SHAKE wrappers over OpenSSL EVP, and seeded sampling
 */

#include <kemfault/symmetric.hpp>

#include <kemfault/error.hpp>

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace kemfault {

namespace {

struct MdDeleter {
      void operator()(EVP_MD* md) const { EVP_MD_free(md); }
};

struct CtxDeleter {
      void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* fetch(const char* name) {
   EVP_MD* md = EVP_MD_fetch(nullptr, name, nullptr);
   if(md == nullptr) {
      throw std::runtime_error(std::string("OpenSSL does not provide ") + name);
   }
   return md;
}

const EVP_MD* md_shake128() {
   static const std::unique_ptr<EVP_MD, MdDeleter> md(const_cast<EVP_MD*>(fetch("SHAKE128")));
   return md.get();
}

const EVP_MD* md_shake256() {
   static const std::unique_ptr<EVP_MD, MdDeleter> md(const_cast<EVP_MD*>(fetch("SHAKE256")));
   return md.get();
}

const EVP_MD* md_sha3_256() {
   static const std::unique_ptr<EVP_MD, MdDeleter> md(const_cast<EVP_MD*>(fetch("SHA3-256")));
   return md.get();
}

const EVP_MD* md_sha3_512() {
   static const std::unique_ptr<EVP_MD, MdDeleter> md(const_cast<EVP_MD*>(fetch("SHA3-512")));
   return md.get();
}

EVP_MD_CTX* thread_ctx() {
   thread_local const std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
   if(!ctx) {
      throw std::runtime_error("EVP_MD_CTX_new failed");
   }
   return ctx.get();
}

void digest(const EVP_MD* md, std::span<const std::uint8_t> in, std::span<std::uint8_t> out, bool xof) {
   EVP_MD_CTX* ctx = thread_ctx();
   bool ok = EVP_DigestInit_ex2(ctx, md, nullptr) == 1 && EVP_DigestUpdate(ctx, in.data(), in.size()) == 1;
   if(ok) {
      if(xof) {
         ok = EVP_DigestFinalXOF(ctx, out.data(), out.size()) == 1;
      } else {
         unsigned int len = 0;
         ok = EVP_DigestFinal_ex(ctx, out.data(), &len) == 1 && len == out.size();
      }
   }
   if(!ok) {
      throw std::runtime_error("OpenSSL digest computation failed");
   }
}

}  // namespace

void shake128(std::span<const std::uint8_t> in, std::span<std::uint8_t> out) {
   digest(md_shake128(), in, out, true);
}

void shake256(std::span<const std::uint8_t> in, std::span<std::uint8_t> out) {
   digest(md_shake256(), in, out, true);
}

Digest32 sha3_256(std::span<const std::uint8_t> in) {
   Digest32 out;
   digest(md_sha3_256(), in, out, false);
   return out;
}

Digest64 sha3_512(std::span<const std::uint8_t> in) {
   Digest64 out;
   digest(md_sha3_512(), in, out, false);
   return out;
}

Seed Seed::from_u64(std::uint64_t value) {
   std::array<std::uint8_t, 8> le{};
   for(std::size_t i = 0; i != 8; ++i) {
      le[i] = static_cast<std::uint8_t>(value >> (8 * i));
   }
   Seed s;
   shake256(le, s.bytes);
   return s;
}

Seed Seed::derive(std::string_view label, std::uint64_t index) const {
   std::vector<std::uint8_t> in(bytes.begin(), bytes.end());
   in.push_back(static_cast<std::uint8_t>(label.size()));
   in.insert(in.end(), label.begin(), label.end());
   for(std::size_t i = 0; i != 8; ++i) {
      in.push_back(static_cast<std::uint8_t>(index >> (8 * i)));
   }
   Seed s;
   shake256(in, s.bytes);
   return s;
}

XofStream::XofStream(std::span<const std::uint8_t> input, std::size_t initial) :
      m_input(input.begin(), input.end()), m_buffer(initial == 0 ? 64 : initial) {
   shake128(m_input, m_buffer);
}

std::uint8_t XofStream::next_byte() {
   if(m_pos == m_buffer.size()) {
      m_buffer.resize(2 * m_buffer.size());
      shake128(m_input, m_buffer);
   }
   return m_buffer[m_pos++];
}

std::uint32_t XofStream::next_u32() {
   std::uint32_t v = 0;
   for(unsigned i = 0; i != 4; ++i) {
      v |= static_cast<std::uint32_t>(next_byte()) << (8 * i);
   }
   return v;
}

Poly sample_cbd(const Seed& seed, unsigned eta, const Modulus& m) {
   if(eta == 0 || eta > 16) {
      throw ParameterError("CBD parameter must lie in [1, 16], got " + std::to_string(eta));
   }
   const std::size_t n = m.n();
   std::vector<std::uint8_t> buf((2 * eta * n + 7) / 8);
   shake256(seed.bytes, buf);

   auto bit = [&](std::size_t i) { return (buf[i / 8] >> (i % 8)) & 1; };

   Poly p(m);
   std::size_t pos = 0;
   for(std::size_t i = 0; i != n; ++i) {
      int a = 0;
      int b = 0;
      for(unsigned j = 0; j != eta; ++j) {
         a += bit(pos++);
      }
      for(unsigned j = 0; j != eta; ++j) {
         b += bit(pos++);
      }
      p.set(i, a - b);
   }
   return p;
}

Poly sample_uniform(const Seed& seed, const Modulus& m) {
   XofStream xof(seed.bytes, 4 * m.n() + 256);
   const unsigned bits = m.bit_length();
   const std::uint32_t mask = bits >= 32 ? ~0u : (1u << bits) - 1;
   Poly p(m);
   std::size_t i = 0;
   while(i != m.n()) {
      const std::uint32_t v = xof.next_u32() & mask;
      if(v < m.q()) {
         p.set(i++, v);
      }
   }
   return p;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
   static constexpr char digits[] = "0123456789abcdef";
   std::string out;
   out.reserve(2 * bytes.size());
   for(auto b : bytes) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 0xf]);
   }
   return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
   auto nibble = [](char c) -> int {
      if(c >= '0' && c <= '9') {
         return c - '0';
      }
      if(c >= 'a' && c <= 'f') {
         return c - 'a' + 10;
      }
      if(c >= 'A' && c <= 'F') {
         return c - 'A' + 10;
      }
      return -1;
   };
   if(hex.size() % 2 != 0) {
      throw ParameterError("hex string has odd length");
   }
   std::vector<std::uint8_t> out(hex.size() / 2);
   for(std::size_t i = 0; i != out.size(); ++i) {
      const int hi = nibble(hex[2 * i]);
      const int lo = nibble(hex[2 * i + 1]);
      if(hi < 0 || lo < 0) {
         throw ParameterError("invalid hex digit");
      }
      out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
   }
   return out;
}

}  // namespace kemfault
