#include <doctest.h>

#include <kemfault/attack.hpp>
#include <kemfault/error.hpp>
#include <kemfault/faultsim.hpp>

#include <cmath>

using namespace kemfault;

namespace {

MemoryModel model_with_flag_cell(std::uint64_t seed) {
   MemoryConfig cfg;
   cfg.planted = 6;
   cfg.seed = seed;
   MemoryModel m(cfg);
   m.plant(VulnerableCell{0x1234'5000 + 0x040, FlipDirection::one_to_zero});
   return m;
}

FaultPlan armed_plan(const FaultPlanConfig& cfg) {
   const auto m = model_with_flag_cell(1);
   FaultPlan plan(template_memory(m, 1), m.config().page_size, cfg);
   REQUIRE(plan.place_victim().placed);
   plan.arm();
   return plan;
}

}  // namespace

TEST_SUITE("faultsim") {
   TEST_CASE("templating finds exactly the planted cells") {
      MemoryConfig cfg;
      cfg.planted = 0;
      CHECK(template_memory(MemoryModel(cfg), 3).empty());

      cfg.planted = 5;
      cfg.seed = 11;
      const MemoryModel m(cfg);
      const auto all = template_memory(m, 1, false);
      CHECK(all.size() == 5);
      for(const auto& c : m.vulnerable()) {
         CHECK(std::find(all.begin(), all.end(), c) != all.end());
         CHECK(c.address % cfg.stride == 0);
         CHECK(c.address < cfg.n1);
      }
      for(const auto& c : template_memory(m, 1)) {
         CHECK(c.direction == FlipDirection::one_to_zero);
      }
   }

   TEST_CASE("templating a gigabyte with few weak cells") {
      MemoryConfig cfg;
      cfg.n1 = std::uint64_t(1) << 30;
      cfg.planted = 9;
      cfg.seed = 4;
      const auto found = template_memory(MemoryModel(cfg), 2, false);
      CHECK(found.size() < 10);
   }

   TEST_CASE("identical seeds reproduce templating and latencies") {
      MemoryConfig cfg;
      cfg.planted = 7;
      cfg.seed = 21;
      cfg.flip_probability = 0.5;
      CHECK(template_memory(MemoryModel(cfg), 2, false) == template_memory(MemoryModel(cfg), 2, false));
      cfg.seed = 22;
      CHECK(MemoryModel(cfg).vulnerable() != MemoryModel(MemoryConfig{cfg.n1, 7, 4096, 0x20, 0.5, 21}).vulnerable());

      FaultPlanConfig pc;
      pc.seed = 5;
      auto a = armed_plan(pc);
      auto b = armed_plan(pc);
      for(int i = 0; i != 10; ++i) {
         CHECK(a.induce_flip().latency_ms == b.induce_flip().latency_ms);
      }
   }

   TEST_CASE("memory model validation") {
      MemoryConfig cfg;
      cfg.stride = 0x30;
      CHECK_THROWS_AS(MemoryModel{cfg}, ParameterError);
      cfg = MemoryConfig{};
      cfg.n1 = 64;
      cfg.planted = 3;
      CHECK_THROWS_AS(MemoryModel{cfg}, ParameterError);
      MemoryModel m(MemoryConfig{});
      CHECK_THROWS_AS(m.plant(VulnerableCell{0x41, FlipDirection::one_to_zero}), ParameterError);
      m.plant(VulnerableCell{0x40, FlipDirection::one_to_zero});
      CHECK_THROWS_AS(m.plant(VulnerableCell{0x40, FlipDirection::zero_to_one}), ParameterError);
   }

   TEST_CASE("collision probability") {
      CHECK(collision_probability(10, std::uint64_t(1) << 30) == Rational{5, std::uint64_t(1) << 59});
      CHECK(collision_probability(0, 1024) == Rational{0, 1});
      CHECK(collision_probability(4, 1024) == Rational{1, 1 << 18});
      CHECK_THROWS_AS(collision_probability(1, 0), ParameterError);
      CHECK_THROWS_AS(collision_probability(5, 4), ParameterError);
   }

   TEST_CASE("collision Monte Carlo at small scale") {
      const std::uint64_t trials = 10'000'000;
      const auto r = collision_monte_carlo(4, 1024, trials, 9);
      const double p = 4.0 / double(1 << 20);
      const double mean = p * trials;
      const double sigma = std::sqrt(trials * p * (1 - p));
      CHECK(std::abs(double(r.hits) - mean) <= 3 * sigma);
   }

   TEST_CASE("victim placement") {
      FaultPlanConfig pc;
      const auto m = model_with_flag_cell(2);
      FaultPlan plan(template_memory(m, 1), 4096, pc);
      CHECK(plan.state() == FaultPlan::State::templated);
      CHECK_THROWS_AS(plan.arm(), StateError);
      CHECK_THROWS_AS(plan.induce_flip(), StateError);
      const auto out = plan.place_victim();
      CHECK(out.placed);
      CHECK(out.cell.address % 4096 == 0x040);
      CHECK(plan.state() == FaultPlan::State::placed);
      plan.arm();
      CHECK(plan.state() == FaultPlan::State::armed);

      MemoryConfig cfg;
      cfg.planted = 0;
      MemoryModel wrong(cfg);
      wrong.plant(VulnerableCell{0x7000 + 0x040, FlipDirection::zero_to_one});
      wrong.plant(VulnerableCell{0x7000 + 0x060, FlipDirection::one_to_zero});
      FaultPlan none(template_memory(wrong, 1, false), 4096, pc);
      CHECK_THROWS_AS(none.place_victim(), PlacementImpossible);
   }

   TEST_CASE("probabilistic placement rate") {
      const auto m = model_with_flag_cell(3);
      const auto cells = template_memory(m, 1);
      const int trials = 10000;
      int placed = 0;
      for(int i = 0; i != trials; ++i) {
         FaultPlanConfig pc;
         pc.placement_probability = 0.5;
         pc.seed = std::uint64_t(i);
         placed += FaultPlan(cells, 4096, pc).place_victim().placed;
      }
      CHECK(std::abs(placed - trials / 2) <= 3 * std::sqrt(trials * 0.25));
   }

   TEST_CASE("latency stays under the cap") {
      FaultPlanConfig pc;
      auto plan = armed_plan(pc);
      for(int i = 0; i != 10000; ++i) {
         const auto r = plan.induce_flip();
         CHECK(r.success);
         CHECK(r.latency_ms >= 0);
         CHECK(r.latency_ms <= 350.0);
      }
      auto budget = armed_plan(pc);
      for(int i = 0; i != 57; ++i) {
         budget.induce_flip();
      }
      CHECK(budget.inductions() == 57);
      CHECK(budget.total_latency_ms() <= 57 * 350.0);
   }

   TEST_CASE("injector retries until the flag flips") {
      FaultPlanConfig pc;
      pc.flip_probability = 0.25;
      pc.seed = 6;
      auto plan = armed_plan(pc);
      RowhammerInjector inj(plan);
      for(int i = 0; i != 100; ++i) {
         inj.induce();
      }
      CHECK(inj.faults() == 100);
      CHECK(plan.flips() == 100);
      CHECK(plan.inductions() > 100);

      pc.flip_probability = 0.0;
      auto stuck = armed_plan(pc);
      RowhammerInjector never(stuck, 10);
      CHECK_THROWS_AS(never.induce(), StateError);
   }

   TEST_CASE("fault-backed matched attack consumes one fault per query") {
      const auto& p = scheme_params(SchemeId::kyber768);
      const auto kp = kem_keygen(p, Seed::from_u64(12));
      FaultPlanConfig pc;
      auto plan = armed_plan(pc);
      RowhammerInjector inj(plan);
      FaultController fc(FaultController::Mode::force_pass, &inj);
      Oracle o(p, kp, OracleMode::matched, &fc);
      AttackConfig cfg;
      cfg.t = 10;
      const auto r = recover_key(cfg, o, &kp.sk());
      CHECK(r.success == true);
      CHECK(r.faults == r.queries);
      CHECK(inj.faults() == r.queries);
      CHECK(plan.inductions() == r.queries);
      CHECK(plan.total_latency_ms() <= 350.0 * r.queries);
   }
}
