/*
 * Simulated Rowhammer delivery of the decapsulation fault
 */

#ifndef KEMFAULT_FAULTSIM_HPP_
#define KEMFAULT_FAULTSIM_HPP_

#include <kemfault/kem.hpp>
#include <kemfault/tree.hpp>

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace kemfault {

enum class FlipDirection { one_to_zero, zero_to_one };

std::string_view to_string(FlipDirection d);

struct VulnerableCell {
      std::uint64_t address;
      FlipDirection direction;

      bool operator==(const VulnerableCell&) const = default;
};

struct MemoryConfig {
      /// N1, number of addressable bytes
      std::uint64_t n1 = std::uint64_t(1) << 30;
      /// N, randomly planted vulnerable cells
      std::size_t planted = 8;
      std::uint32_t page_size = 4096;
      /// vulnerable cells sit on multiples of this
      std::uint32_t stride = 0x20;
      /// chance a vulnerable cell flips in one hammer pass
      double flip_probability = 1.0;
      std::uint64_t seed = 0;
};

/// Address space with a seeded set of vulnerable cells.
class MemoryModel {
   public:
      explicit MemoryModel(const MemoryConfig& config);

      const MemoryConfig& config() const { return m_config; }

      const std::vector<VulnerableCell>& vulnerable() const { return m_cells; }

      std::uint32_t page_offset(std::uint64_t address) const { return address % m_config.page_size; }

      /// Adds a cell; ParameterError when off-grid, out of range or duplicate.
      void plant(VulnerableCell cell);

   private:
      MemoryConfig m_config;
      std::vector<VulnerableCell> m_cells;
};

/**
 * Hammers every stride-aligned address `passes` times and reports the
 * cells that flipped at least once, in address order. With only_one_to_zero
 * set, 0->1 cells are dropped.
 */
std::vector<VulnerableCell> template_memory(const MemoryModel& model, unsigned passes, bool only_one_to_zero = true);

/// N / N1^2. ParameterError when N1 = 0, N > N1 or N1^2 overflows.
Rational collision_probability(std::uint64_t n, std::uint64_t n1);

struct MonteCarloResult {
      std::uint64_t trials;
      std::uint64_t hits;

      double rate() const { return double(hits) / double(trials); }
};

/**
 * Each trial places the flag uniformly, hammers one uniform address and
 * counts a hit when the hammered cell is the flag and is vulnerable.
 */
MonteCarloResult collision_monte_carlo(std::uint64_t n, std::uint64_t n1, std::uint64_t trials, std::uint64_t seed);

/// Time-to-flip: exponential with the given mean, truncated at the cap.
struct LatencyModel {
      double mean_ms = 100.0;
      double cap_ms = 350.0;

      double sample(std::mt19937_64& rng) const;
};

struct FaultPlanConfig {
      std::uint32_t flag_offset = 0x040;
      double placement_probability = 1.0;
      double flip_probability = 1.0;
      LatencyModel latency;
      std::uint64_t seed = 0;
};

struct PlacementOutcome {
      bool placed;
      VulnerableCell cell;
};

struct FlipResult {
      bool success;
      double latency_ms;
};

/**
 * templated -> placed -> armed. Placement picks the first templated 1->0
 * cell whose page offset equals the flag's; the victim then reuses the
 * freed page with the configured probability.
 */
class FaultPlan {
   public:
      enum class State { templated, placed, armed };

      FaultPlan(std::vector<VulnerableCell> templated, std::uint32_t page_size, const FaultPlanConfig& config);

      State state() const { return m_state; }

      const FaultPlanConfig& config() const { return m_config; }

      /// PlacementImpossible when no cell matches the offset.
      PlacementOutcome place_victim();

      /// StateError unless placed.
      void arm();

      /// StateError unless armed.
      FlipResult induce_flip();

      std::uint64_t inductions() const { return m_inductions; }

      std::uint64_t flips() const { return m_flips; }

      double total_latency_ms() const { return m_total_latency; }

      double max_latency_ms() const { return m_max_latency; }

   private:
      std::vector<VulnerableCell> m_templated;
      std::uint32_t m_page_size;
      FaultPlanConfig m_config;
      std::mt19937_64 m_rng;
      State m_state = State::templated;
      std::uint64_t m_inductions = 0;
      std::uint64_t m_flips = 0;
      double m_total_latency = 0;
      double m_max_latency = 0;
};

std::string_view to_string(FaultPlan::State s);

/// Drives an armed plan until the flag flips, once per requested fault.
class RowhammerInjector : public FaultInjector {
   public:
      explicit RowhammerInjector(FaultPlan& plan, std::uint64_t max_attempts = 1000000) :
            m_plan(plan), m_max_attempts(max_attempts) {}

      void induce() override;

      std::uint64_t faults() const { return m_faults; }

   private:
      FaultPlan& m_plan;
      std::uint64_t m_max_attempts;
      std::uint64_t m_faults = 0;
};

}  // namespace kemfault

#endif
