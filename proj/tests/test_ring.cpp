#include <doctest.h>

#include <kemfault/error.hpp>
#include <kemfault/ring.hpp>
#include <kemfault/symmetric.hpp>

#include <cmath>
#include <random>

using namespace kemfault;

namespace {

Poly random_poly(const Modulus& m, std::mt19937_64& rng) {
   std::uniform_int_distribution<std::uint32_t> dist(0, m.q() - 1);
   std::vector<std::uint32_t> c(m.n());
   for(auto& x : c) {
      x = dist(rng);
   }
   return Poly(m, c);
}

// Plain convolution, then substitute x^n = -1 term by term.
std::vector<std::int64_t> naive_negacyclic(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                           std::int64_t q) {
   const std::size_t n = a.size();
   std::vector<std::int64_t> full(2 * n, 0);
   for(std::size_t i = 0; i < n; ++i) {
      for(std::size_t j = 0; j < n; ++j) {
         full[i + j] += a[i] * b[j];
      }
   }
   std::vector<std::int64_t> r(n);
   for(std::size_t k = 0; k < n; ++k) {
      r[k] = ((full[k] - full[k + n]) % q + q) % q;
   }
   return r;
}

}  // namespace

TEST_SUITE("ring") {
   TEST_CASE("modulus validation") {
      CHECK_THROWS_AS(Modulus(2, 256), ParameterError);
      CHECK_THROWS_AS(Modulus(3329, 100), ParameterError);
      CHECK_THROWS_AS(Modulus(3329, 0), ParameterError);
      CHECK(Modulus(3329, 256).bit_length() == 12);
      CHECK(Modulus(8192, 256).bit_length() == 13);
      CHECK(Modulus(8192, 256).is_power_of_two());
   }

   TEST_CASE("poly constructor rejects unreduced and short inputs") {
      const Modulus m(17, 4);
      CHECK_THROWS_AS(Poly(m, {1, 2, 3}), ParameterError);
      CHECK_THROWS_AS(Poly(m, {1, 2, 3, 17}), ParameterError);
      CHECK(Poly::from_signed(m, {-1, 0, 1, -16}).coeffs()[0] == 16);
   }

   TEST_CASE("negacyclic wrap of x^(n-1) * x") {
      const Modulus m(3329, 256);
      Poly a(m);
      Poly b(m);
      a.set(255, 1);
      b.set(1, 1);
      const Poly r = poly_mul_negacyclic(a, b);
      CHECK(r[0] == 3328);
      for(std::size_t i = 1; i != 256; ++i) {
         CHECK(r[i] == 0);
      }
   }

   TEST_CASE("constant one is the identity") {
      const Modulus m(3329, 256);
      std::mt19937_64 rng(1);
      Poly one(m);
      one.set(0, 1);
      const Poly b = random_poly(m, rng);
      CHECK(poly_mul_negacyclic(one, b) == b);
      CHECK(poly_mul_negacyclic(b, one) == b);
   }

   TEST_CASE("matches naive convolution at n = 4, q = 17") {
      const Modulus m(17, 4);
      std::mt19937_64 rng(2);
      for(int trial = 0; trial != 500; ++trial) {
         const Poly a = random_poly(m, rng);
         const Poly b = random_poly(m, rng);
         std::vector<std::int64_t> av(a.coeffs().begin(), a.coeffs().end());
         std::vector<std::int64_t> bv(b.coeffs().begin(), b.coeffs().end());
         const auto expect = naive_negacyclic(av, bv, 17);
         const Poly r = poly_mul_negacyclic(a, b);
         for(std::size_t k = 0; k != 4; ++k) {
            CHECK(r[k] == expect[k]);
         }
      }
   }

   TEST_CASE("matches naive convolution at n = 256 for both moduli") {
      std::mt19937_64 rng(3);
      for(std::uint32_t q : {3329u, 8192u}) {
         const Modulus m(q, 256);
         const Poly a = random_poly(m, rng);
         const Poly b = random_poly(m, rng);
         std::vector<std::int64_t> av(a.coeffs().begin(), a.coeffs().end());
         std::vector<std::int64_t> bv(b.coeffs().begin(), b.coeffs().end());
         const auto expect = naive_negacyclic(av, bv, q);
         const Poly r = poly_mul_negacyclic(a, b);
         for(std::size_t k = 0; k != 256; ++k) {
            REQUIRE(r[k] == expect[k]);
         }
      }
   }

   TEST_CASE("multiplication commutes and distributes") {
      const Modulus m(3329, 256);
      std::mt19937_64 rng(4);
      for(int trial = 0; trial != 20; ++trial) {
         const Poly a = random_poly(m, rng);
         const Poly b = random_poly(m, rng);
         const Poly c = random_poly(m, rng);
         CHECK(poly_mul_negacyclic(a, b) == poly_mul_negacyclic(b, a));
         CHECK(poly_mul_negacyclic(a, b + c) == poly_mul_negacyclic(a, b) + poly_mul_negacyclic(a, c));
      }
   }

   TEST_CASE("mismatched rings are rejected") {
      const Poly a(Modulus(3329, 256));
      const Poly b(Modulus(8192, 256));
      const Poly c(Modulus(3329, 128));
      CHECK_THROWS_AS(poly_mul_negacyclic(a, b), ParameterError);
      CHECK_THROWS_AS(poly_mul_negacyclic(a, c), ParameterError);
      CHECK_THROWS_AS(a + b, ParameterError);
   }

   TEST_CASE("compress values") {
      const Modulus m(3329, 256);
      for(unsigned d = 1; d != 12; ++d) {
         CHECK(compress(0, d, m) == 0);
      }
      CHECK(compress(3205, 10, m) == 986);
      CHECK(compress(2497, 1, m) == 0);
      CHECK(compress(2373, 1, m) == 1);
      CHECK_THROWS_AS(compress(1, 12, m), ParameterError);
      CHECK_THROWS_AS(compress(1, 0, m), ParameterError);
      CHECK_THROWS_AS(compress(3329, 4, m), ParameterError);
   }

   TEST_CASE("decompress values") {
      const Modulus m(3329, 256);
      CHECK(decompress(0, 10, m) == 0);
      CHECK(decompress(38, 10, m) == 124);
      CHECK(decompress(12, 4, m) == 2497);
      CHECK(decompress(14, 4, m) == 2913);
      CHECK(decompress(986, 10, m) == 3205);
      CHECK_THROWS_AS(decompress(16, 4, m), ParameterError);
   }

   TEST_CASE("compression error is bounded") {
      const Modulus m(3329, 256);
      for(unsigned d = 1; d != 12; ++d) {
         const std::int64_t bound = std::llround(3329.0 / std::pow(2.0, d + 1));
         for(std::uint32_t x = 0; x != 3329; ++x) {
            const std::int64_t y = decompress(compress(x, d, m), d, m);
            const auto diff = m.centered(m.reduce(std::int64_t(x) - y));
            REQUIRE(std::abs(diff) <= bound);
         }
      }
   }

   TEST_CASE("shift_round") {
      CHECK(shift_round(0, 13, 10) == 0);
      CHECK(shift_round(3, 13, 10) == 0);
      CHECK(shift_round(4, 13, 10) == 1);
      CHECK(shift_round(8191, 13, 10) == 0);
      CHECK(shift_round((1u << 5) - 1, 16, 10) == 0);
      CHECK_THROWS_AS(shift_round(1, 10, 10), ParameterError);
   }

   TEST_CASE("cbd support and determinism") {
      const Modulus m(3329, 256);
      for(unsigned eta : {1u, 2u, 3u, 4u, 5u}) {
         const Poly p = sample_cbd(Seed::from_u64(eta), eta, m);
         for(std::size_t i = 0; i != 256; ++i) {
            CHECK(std::abs(p.centered(i)) <= int(eta));
         }
         CHECK(sample_cbd(Seed::from_u64(eta), eta, m) == p);
      }
      CHECK_THROWS_AS(sample_cbd(Seed{}, 0, m), ParameterError);
   }

   TEST_CASE("cbd frequencies") {
      const Modulus m(8192, 256);
      const std::size_t polys = 3907;  // ~10^6 coefficients
      const double total = double(polys * 256);

      auto within = [&](std::size_t hits, double p) {
         const double sigma = std::sqrt(total * p * (1 - p));
         return std::abs(double(hits) - total * p) <= 3 * sigma;
      };

      std::size_t zeros = 0;
      std::size_t tails = 0;
      std::array<std::size_t, 9> hist{};
      for(std::size_t k = 0; k != polys; ++k) {
         const Poly p2 = sample_cbd(Seed::from_u64(1000 + k), 2, m);
         const Poly p4 = sample_cbd(Seed::from_u64(9000000 + k), 4, m);
         for(std::size_t i = 0; i != 256; ++i) {
            zeros += p2.centered(i) == 0;
            const int s = p4.centered(i);
            tails += (s == 3 || s == 4);
            hist[s + 4]++;
         }
      }
      CHECK(within(zeros, 6.0 / 16));
      CHECK(within(tails, 9.0 / 256));
      CHECK(hist[0] + hist[8] > 0);
   }

   TEST_CASE("uniform sampling stays in range and is deterministic") {
      for(std::uint32_t q : {3329u, 8192u, 17u}) {
         const Modulus m(q, 256);
         const Poly p = sample_uniform(Seed::from_u64(q), m);
         CHECK(sample_uniform(Seed::from_u64(q), m) == p);
         CHECK(sample_uniform(Seed::from_u64(q + 1), m) != p);
      }
   }

   TEST_CASE("xof stream extends its prefix") {
      const std::array<std::uint8_t, 3> in = {1, 2, 3};
      XofStream small(in, 4);
      std::vector<std::uint8_t> ref(64);
      shake128(in, ref);
      for(auto b : ref) {
         CHECK(small.next_byte() == b);
      }
   }

   TEST_CASE("hex round trip") {
      const std::vector<std::uint8_t> raw = {0x00, 0xab, 0xff, 0x10};
      CHECK(to_hex(raw) == "00abff10");
      CHECK(from_hex("00ABff10") == raw);
      CHECK_THROWS_AS(from_hex("abc"), ParameterError);
      CHECK_THROWS_AS(from_hex("zz"), ParameterError);
   }

   TEST_CASE("known SHA-3 vectors") {
      CHECK(to_hex(sha3_256({})) == "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
      std::array<std::uint8_t, 3> abc = {'a', 'b', 'c'};
      CHECK(to_hex(sha3_256(abc)) == "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
      std::array<std::uint8_t, 32> out{};
      shake128({}, out);
      CHECK(to_hex(out) == "7f9c2ba4e88f827d616045507605853ed73b8093f6efbc88eb1a6eacfa66ef26");
   }
}
