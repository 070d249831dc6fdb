#include <doctest.h>

#include <kemfault/attack.hpp>
#include <kemfault/error.hpp>
#include <kemfault/oracle.hpp>

#include <random>

using namespace kemfault;

TEST_SUITE("oracle") {
   TEST_CASE("candidate messages and their indices") {
      const std::vector<std::size_t> pos = {5, 0, 200};
      const CandidateSet c(256, pos);
      CHECK(c.t() == 3);
      CHECK(c.size() == 8);
      for(std::uint64_t i = 0; i != c.size(); ++i) {
         const Message m = c.message(i);
         CHECK(m.bit(5) == bool(i & 1));
         CHECK(m.bit(0) == bool(i & 2));
         CHECK(m.bit(200) == bool(i & 4));
         CHECK(c.index_of(m) == i);
      }
      Message outside(256);
      outside.set_bit(1, true);
      CHECK_FALSE(c.index_of(outside));
      CHECK_FALSE(c.index_of(Message(512)));
      CHECK_THROWS_AS(c.message(8), ParameterError);
   }

   TEST_CASE("candidate set validation") {
      CHECK_THROWS_AS(CandidateSet(256, {}), ParameterError);
      CHECK_THROWS_AS(CandidateSet(256, {1, 1}), ParameterError);
      CHECK_THROWS_AS(CandidateSet(256, {256}), ParameterError);
      std::vector<std::size_t> wide(64);
      for(std::size_t i = 0; i != wide.size(); ++i) {
         wide[i] = i;
      }
      CHECK_THROWS_AS(CandidateSet(256, wide), ParameterError);
      CHECK_THROWS_AS(gen_candidates(256, std::span(wide).first(33)), ParameterError);
      CHECK(gen_candidates(256, std::span(wide).first(32)).t() == 32);
      CHECK_THROWS_AS(gen_candidates(256, std::span(wide).first(17), 16), ParameterError);
   }

   TEST_CASE("ideal and matched oracles agree on crafted queries") {
      std::mt19937_64 rng(3);
      for(auto id : {SchemeId::kyber768, SchemeId::saber}) {
         const auto& p = scheme_params(id);
         const auto tree = canonical_table(id).tree;
         const auto kp = kem_keygen(p, Seed::from_u64(17));
         Oracle ideal(p, kp, OracleMode::ideal);
         Oracle matched(p, kp, OracleMode::matched);
         for(int trial = 0; trial != 20; ++trial) {
            const std::size_t t = 1 + rng() % 8;
            const std::size_t start = rng() % (p.n - t + 1);
            std::vector<std::uint32_t> probes(t);
            std::vector<std::size_t> pos(t);
            for(std::size_t j = 0; j != t; ++j) {
               probes[j] = *tree.root().d;
               pos[j] = j;
            }
            const auto ct = craft_block_ct(p, rng() % p.l, start, probes, tree.level_k_u()[0], tree.v_filler(),
                                           ProbeMode::sign_normalized);
            const CandidateSet cands(p.n, pos);
            CHECK(ideal.query(ct, cands) == matched.query(ct, cands));
         }
         CHECK(matched.log().queries == 20);
         CHECK(matched.log().faults == 20);
         CHECK(ideal.log().faults == 0);
         CHECK(matched.log().offline_hashes >= 20);
         CHECK(ideal.log().records.size() == 20);
         CHECK(ideal.log().records[3].ct_digest == matched.log().records[3].ct_digest);
      }
   }

   TEST_CASE("a message outside the candidates is an oracle miss") {
      const auto& p = scheme_params(SchemeId::kyber768);
      const auto kp = kem_keygen(p, Seed::from_u64(2));
      Ciphertext ct = Ciphertext::zero(p);
      ct.v[7] = 8;  // decompresses near q/2, so bit 7 decodes to 1
      const CandidateSet cands(p.n, {0});
      Oracle ideal(p, kp, OracleMode::ideal);
      Oracle matched(p, kp, OracleMode::matched);
      CHECK_THROWS_AS(ideal.query(ct, cands), OracleMiss);
      CHECK_THROWS_AS(matched.query(ct, cands), OracleMiss);
      CHECK(ideal.query(ct, CandidateSet(p.n, {7})) == 1);
   }

   TEST_CASE("ceilings and configuration errors") {
      const auto& p = scheme_params(SchemeId::kyber768);
      const auto kp = kem_keygen(p, Seed::from_u64(2));
      Oracle matched(p, kp, OracleMode::matched);
      Oracle ideal(p, kp, OracleMode::ideal);
      CHECK(matched.max_t() == 24);
      CHECK(ideal.max_t() == 32);
      std::vector<std::size_t> pos(25);
      for(std::size_t i = 0; i != pos.size(); ++i) {
         pos[i] = i;
      }
      CHECK_THROWS_AS(matched.query(Ciphertext::zero(p), CandidateSet(p.n, pos)), ParameterError);
      Oracle narrow(p, kp, OracleMode::ideal, nullptr, OracleLimits{4, 4});
      CHECK_THROWS_AS(narrow.query(Ciphertext::zero(p), CandidateSet(p.n, {0, 1, 2, 3, 4})), ParameterError);

      FaultController off(FaultController::Mode::none);
      CHECK_THROWS_AS(Oracle(p, kp, OracleMode::matched, &off), ParameterError);
      CHECK_THROWS_AS(Oracle(scheme_params(SchemeId::saber), kp, OracleMode::ideal), ParameterError);
      CHECK_THROWS_AS(ideal.query(Ciphertext::zero(p), CandidateSet(512, {0})), ParameterError);
      CHECK_THROWS_AS(ideal.query(Ciphertext::zero(scheme_params(SchemeId::kyber512)), CandidateSet(p.n, {0})),
                      ParameterError);
   }

   TEST_CASE("external fault controller counts every query") {
      const auto& p = scheme_params(SchemeId::saber);
      const auto kp = kem_keygen(p, Seed::from_u64(8));
      FaultController fc(FaultController::Mode::force_pass);
      Oracle o(p, kp, OracleMode::matched, &fc);
      const std::vector<std::uint32_t> probes = {4, 4, 4};
      const auto ct = craft_block_ct(p, 0, 0, probes, 0x3c8, 0, ProbeMode::sign_normalized);
      o.query(ct, CandidateSet(p.n, {0, 1, 2}));
      o.query(ct, CandidateSet(p.n, {0, 1, 2}));
      CHECK(fc.faults() == 2);
      CHECK(o.log().faults == 2);
   }

   TEST_CASE("oracle mode names") {
      CHECK(parse_oracle_mode("ideal") == OracleMode::ideal);
      CHECK(to_string(parse_oracle_mode("matched")) == "matched");
      CHECK_THROWS_AS(parse_oracle_mode("fast"), ParameterError);
   }
}
