#include <doctest.h>

#include <kemfault/error.hpp>
#include <kemfault/kem.hpp>
#include <kemfault/serialize.hpp>

#include <random>

using namespace kemfault;

namespace {

Message random_message(std::size_t n, std::mt19937_64& rng) {
   Message m(n);
   for(std::size_t i = 0; i != n; ++i) {
      m.set_bit(i, rng() & 1);
   }
   return m;
}

const SchemeParams& kyber768() {
   return scheme_params(SchemeId::kyber768);
}

const SchemeParams& saber() {
   return scheme_params(SchemeId::saber);
}

}  // namespace

TEST_SUITE("schemes") {
   TEST_CASE("parameter sets") {
      struct Row {
            SchemeId id;
            std::size_t l;
            std::uint32_t q, p, T;
            unsigned eta1, eta2;
      };

      const Row rows[] = {
         {SchemeId::kyber512, 2, 3329, 1024, 16, 3, 2},
         {SchemeId::kyber768, 3, 3329, 1024, 16, 2, 2},
         {SchemeId::kyber1024, 4, 3329, 2048, 32, 2, 2},
         {SchemeId::lightsaber, 2, 8192, 1024, 8, 5, 5},
         {SchemeId::saber, 3, 8192, 1024, 16, 4, 4},
         {SchemeId::firesaber, 4, 8192, 1024, 64, 3, 3},
      };
      for(const auto& r : rows) {
         const auto& p = scheme_params(r.id);
         CAPTURE(p.name());
         CHECK(p.n == 256);
         CHECK(p.l == r.l);
         CHECK(p.q == r.q);
         CHECK(p.p == r.p);
         CHECK(p.T == r.T);
         CHECK(p.eta1 == r.eta1);
         CHECK(p.eta2 == r.eta2);
      }
      CHECK(kyber768().du == 10);
      CHECK(kyber768().dv == 4);
      CHECK(scheme_params(SchemeId::kyber1024).du == 11);
      CHECK(scheme_params(SchemeId::kyber1024).dv == 5);
      CHECK(saber().eps_q == 13);
      CHECK(saber().eps_p == 10);
      CHECK(saber().eps_T == 4);
   }

   TEST_CASE("saber rounding constants") {
      CHECK(saber().h1 == 4);
      CHECK(saber().h2 == 228);
      CHECK(scheme_params(SchemeId::lightsaber).h2 == 196);
      CHECK(scheme_params(SchemeId::firesaber).h2 == 252);
   }

   TEST_CASE("scheme names round trip") {
      for(auto id : all_scheme_ids()) {
         CHECK(parse_scheme_id(to_string(id)) == id);
      }
      CHECK_THROWS_AS(parse_scheme_id("kyber"), ParameterError);
   }

   TEST_CASE("degenerate lpr key has b = s") {
      const auto& p = scheme_params(SchemeId::lpr_generic);
      const KeyPair kp = pke_keygen(p, Seed::from_u64(5), KeygenOptions{true, true});
      CHECK(kp.pk.b[0] == kp.sk.s[0]);
   }

   TEST_CASE("keygen shapes and ranges") {
      const KeyPair k = pke_keygen(kyber768(), Seed::from_u64(1));
      REQUIRE(k.sk.s.size() == 3);
      for(const auto& poly : k.sk.s) {
         for(std::size_t i = 0; i != 256; ++i) {
            CHECK(std::abs(poly.centered(i)) <= 2);
         }
      }
      const KeyPair s = pke_keygen(saber(), Seed::from_u64(1));
      REQUIRE(s.pk.b.size() == 3);
      for(const auto& poly : s.pk.b) {
         CHECK(poly.modulus().q() == 1024);
         for(auto c : poly.coeffs()) {
            CHECK(c < 1024);
         }
      }
      for(const auto& poly : s.sk.s) {
         for(std::size_t i = 0; i != 256; ++i) {
            CHECK(std::abs(poly.centered(i)) <= 4);
         }
      }
   }

   TEST_CASE("saber keygen equation") {
      const auto& p = saber();
      const KeyPair k = pke_keygen(p, Seed::from_u64(2));
      for(std::size_t i = 0; i != p.l; ++i) {
         Poly acc(p.modulus());
         for(std::size_t j = 0; j != p.l; ++j) {
            acc += poly_mul_negacyclic(k.pk.a_at(i, j), k.sk.s[j]);
         }
         for(std::size_t c = 0; c != p.n; ++c) {
            REQUIRE(k.pk.b[i][c] == ((acc[c] + 4) >> 3) % 1024);
         }
      }
   }

   TEST_CASE("pke round trip for every scheme") {
      std::mt19937_64 rng(11);
      for(auto id : all_scheme_ids()) {
         const auto& p = scheme_params(id);
         CAPTURE(p.name());
         for(int trial = 0; trial != 25; ++trial) {
            const KeyPair kp = pke_keygen(p, Seed::from_u64(rng()));
            const Message m = random_message(p.n, rng);
            const Ciphertext ct = pke_enc(p, kp.pk, m, Seed::from_u64(rng()));
            REQUIRE_NOTHROW(ct.validate(p));
            REQUIRE(pke_dec(p, kp.sk, ct) == m);
         }
      }
   }

   TEST_CASE("encryption is deterministic in its coins") {
      const auto& p = kyber768();
      const KeyPair kp = pke_keygen(p, Seed::from_u64(3));
      Message m(256);
      m.set_bit(7, true);
      CHECK(pke_enc(p, kp.pk, m, Seed::from_u64(9)) == pke_enc(p, kp.pk, m, Seed::from_u64(9)));
      CHECK(pke_enc(p, kp.pk, m, Seed::from_u64(9)) != pke_enc(p, kp.pk, m, Seed::from_u64(10)));
   }

   TEST_CASE("encoded message offset is floor(q/2)") {
      const auto& p = scheme_params(SchemeId::lpr_generic);
      const KeyPair kp = pke_keygen(p, Seed::from_u64(4));
      Message ones(256);
      for(std::size_t i = 0; i != 256; ++i) {
         ones.set_bit(i, true);
      }
      const Ciphertext c0 = pke_enc(p, kp.pk, Message(256), Seed::from_u64(1));
      const Ciphertext c1 = pke_enc(p, kp.pk, ones, Seed::from_u64(1));
      CHECK(c0.u == c1.u);
      for(std::size_t i = 0; i != 256; ++i) {
         CHECK((c1.v[i] + 3329 - c0.v[i]) % 3329 == 1664);
      }
   }

   TEST_CASE("all-zero ciphertext decrypts to zero") {
      for(auto id : all_scheme_ids()) {
         const auto& p = scheme_params(id);
         const KeyPair kp = pke_keygen(p, Seed::from_u64(6));
         CHECK(pke_dec(p, kp.sk, Ciphertext::zero(p)).is_zero());
      }
   }

   TEST_CASE("crafted kyber768 ciphertext") {
      const auto& p = kyber768();
      KeyPair kp = pke_keygen(p, Seed::from_u64(7));
      kp.sk.s[0].set(0, 1);
      Ciphertext ct = Ciphertext::zero(p);
      ct.u[0][0] = 38;
      ct.v.assign(256, 14);
      ct.v[0] = 12;
      const Message m = pke_dec(p, kp.sk, ct);
      CHECK(m.bit(0));
      for(std::size_t i = 1; i != 256; ++i) {
         CHECK_FALSE(m.bit(i));
      }
   }

   TEST_CASE("crafted saber ciphertext") {
      const auto& p = saber();
      KeyPair kp = pke_keygen(p, Seed::from_u64(8));
      kp.sk.s[0].set(0, -1);
      Ciphertext ct = Ciphertext::zero(p);
      ct.u[0][0] = 0x3c8;
      ct.v[0] = 4;
      CHECK(pke_dec(p, kp.sk, ct).is_zero());
      kp.sk.s[0].set(0, 0);
      CHECK(pke_dec(p, kp.sk, ct).bit(0));
   }

   TEST_CASE("decode_bit") {
      CHECK(decode_bit(kyber768(), 2497) == 0);
      CHECK(decode_bit(kyber768(), 2373) == 1);
      CHECK(decode_bit(kyber768(), 832) == 0);
      CHECK(decode_bit(kyber768(), 833) == 1);
      CHECK(decode_bit(kyber768(), 2496) == 1);
      CHECK(decode_bit(saber(), (28 + 1024 - 768 + 228) % 1024) == 1);
      CHECK(decode_bit(saber(), 228) == 0);
      CHECK(decode_bit(saber(), 511) == 0);
      CHECK(decode_bit(saber(), 512) == 1);
   }

   TEST_CASE("ciphertext validation") {
      const auto& p = kyber768();
      Ciphertext ct = Ciphertext::zero(p);
      CHECK_NOTHROW(ct.validate(p));
      ct.u[1][3] = 1024;
      CHECK_THROWS_AS(ct.validate(p), ParameterError);
      ct = Ciphertext::zero(p);
      ct.v[0] = 16;
      CHECK_THROWS_AS(ct.validate(p), ParameterError);
      ct = Ciphertext::zero(p);
      ct.u.pop_back();
      CHECK_THROWS_AS(ct.validate(p), ParameterError);
      CHECK_THROWS_AS(pke_dec(saber(), pke_keygen(saber(), Seed{}).sk, Ciphertext::zero(scheme_params(SchemeId::kyber512))),
                      ParameterError);
   }

   TEST_CASE("kem round trip for every scheme") {
      std::mt19937_64 rng(12);
      for(auto id : all_scheme_ids()) {
         const auto& p = scheme_params(id);
         CAPTURE(p.name());
         const KemKeyPair kp = kem_keygen(p, Seed::from_u64(rng()));
         for(int trial = 0; trial != 10; ++trial) {
            const Encapsulation e = kem_encaps(p, kp.pk(), Seed::from_u64(rng()));
            CHECK(kem_decaps(p, kp, e.ct) == e.key);
         }
         CHECK(kem_encaps(p, kp.pk(), Seed::from_u64(1)).key != kem_encaps(p, kp.pk(), Seed::from_u64(2)).key);
      }
   }

   TEST_CASE("fixed message encapsulation is reproducible") {
      const auto& p = saber();
      const KemKeyPair kp = kem_keygen(p, Seed::from_u64(13));
      Message m(256);
      m.set_bit(100, true);
      const auto a = kem_encaps_message(p, kp.pk(), m);
      const auto b = kem_encaps_message(p, kp.pk(), m);
      CHECK(a.ct == b.ct);
      CHECK(a.key == b.key);
   }

   TEST_CASE("fault gate") {
      for(auto id : {SchemeId::kyber768, SchemeId::saber}) {
         const auto& p = scheme_params(id);
         const KemKeyPair kp = kem_keygen(p, Seed::from_u64(14));
         Ciphertext forged = Ciphertext::zero(p);
         forged.u[0][0] = id == SchemeId::saber ? 0x3c8 : 38;
         forged.v[0] = id == SchemeId::saber ? 4 : 12;
         if(id == SchemeId::kyber768) {
            for(std::size_t i = 1; i != 256; ++i) {
               forged.v[i] = 14;
            }
         }
         const Digest32 hct = HashSuite::H(forged.to_bytes());

         FaultController none;
         const SharedKey k_none = kem_decaps(p, kp, forged, none);
         CHECK(k_none == HashSuite::F(kp.z, hct));
         CHECK(none.faults() == 0);

         FaultController pass(FaultController::Mode::force_pass);
         const SharedKey k_pass = kem_decaps(p, kp, forged, pass);
         const Message m = pke_dec(p, kp.sk(), forged);
         CHECK(k_pass == HashSuite::F(HashSuite::G(m, kp.hpk).key, hct));
         CHECK(pass.faults() == 1);
         CHECK(k_pass != k_none);

         const Encapsulation honest = kem_encaps(p, kp.pk(), Seed::from_u64(15));
         CHECK(kem_decaps(p, kp, honest.ct, none) == honest.key);
         CHECK(kem_decaps(p, kp, honest.ct, pass) == honest.key);
         CHECK(pass.faults() == 1);
      }
   }

   TEST_CASE("fault injector is driven once per overridden comparison") {
      struct Counting : FaultInjector {
            int calls = 0;

            void induce() override { ++calls; }
      };

      const auto& p = kyber768();
      const KemKeyPair kp = kem_keygen(p, Seed::from_u64(16));
      Counting inj;
      FaultController fc(FaultController::Mode::force_pass, &inj);
      Ciphertext forged = Ciphertext::zero(p);
      forged.u[0][0] = 38;
      kem_decaps(p, kp, forged, fc);
      kem_decaps(p, kp, forged, fc);
      CHECK(inj.calls == 2);
      CHECK(fc.faults() == 2);
   }

   TEST_CASE("silence of the canonical probe constants") {
      const auto& k = kyber768();
      const Modulus mq = k.modulus();
      for(int s = -2; s <= 2; ++s) {
         for(int sign : {1, -1}) {
            const std::int64_t prod = std::int64_t(sign) * 124 * s;
            CHECK(decode_bit(k, mq.reduce(-prod)) == 0);
            CHECK(decode_bit(k, mq.reduce(2913 - prod)) == 0);
         }
      }
      const auto& sa = saber();
      for(int s = -4; s <= 4; ++s) {
         for(int sign : {1, -1}) {
            for(int ku : {968, 7}) {
               const std::int64_t acc = (std::int64_t(sign) * ku * s + sa.h2) % 1024;
               CHECK(decode_bit(sa, static_cast<std::uint32_t>((acc + 1024) % 1024)) == 0);
            }
         }
      }
   }

   TEST_CASE("serialization round trip") {
      for(auto id : {SchemeId::kyber512, SchemeId::saber, SchemeId::lpr_generic}) {
         const auto& p = scheme_params(id);
         const KemKeyPair kp = kem_keygen(p, Seed::from_u64(17));
         const KemKeyPair back = keypair_from_text(to_text(kp));
         CHECK(back.sk().s == kp.sk().s);
         CHECK(back.pk().b == kp.pk().b);
         CHECK(back.pk().a == kp.pk().a);
         CHECK(back.hpk == kp.hpk);
         CHECK(back.z == kp.z);
         CHECK(public_key_from_text(to_text(kp.pk())).b == kp.pk().b);

         const auto e = kem_encaps(p, kp.pk(), Seed::from_u64(18));
         const auto [sid, ct] = ciphertext_from_text(to_text(id, e.ct));
         CHECK(sid == id);
         CHECK(ct == e.ct);
         CHECK(kem_decaps(p, back, ct) == e.key);
      }
   }

   TEST_CASE("serialization errors") {
      const auto& p = kyber768();
      const KemKeyPair kp = kem_keygen(p, Seed::from_u64(19));
      CHECK_THROWS_AS(public_key_from_text(to_text(kp)), ParameterError);
      CHECK_THROWS_AS(read_header("not json\n"), ParameterError);
      const auto h = read_header(to_text(kp.pk()));
      CHECK(h.scheme == SchemeId::kyber768);
      CHECK(h.role == "public_key");
      CHECK(h.format_version == 1);
      std::string text = to_text(SchemeId::kyber768, Ciphertext::zero(p));
      text.erase(text.find("\nv "));
      CHECK_THROWS_AS(ciphertext_from_text(text), ParameterError);
   }
}
