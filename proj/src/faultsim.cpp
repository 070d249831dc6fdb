/*
 * Simulated Rowhammer delivery of the decapsulation fault
 */

#include <kemfault/faultsim.hpp>

#include <kemfault/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

namespace kemfault {

std::string_view to_string(FlipDirection d) {
   return d == FlipDirection::one_to_zero ? "1->0" : "0->1";
}

std::string_view to_string(FaultPlan::State s) {
   switch(s) {
      case FaultPlan::State::templated:
         return "templated";
      case FaultPlan::State::placed:
         return "placed";
      case FaultPlan::State::armed:
         return "armed";
   }
   return "unknown";
}

MemoryModel::MemoryModel(const MemoryConfig& config) : m_config(config) {
   if(config.n1 == 0 || config.page_size == 0 || config.stride == 0) {
      throw ParameterError("memory size, page size and stride must be positive");
   }
   if(config.page_size % config.stride != 0) {
      throw ParameterError("stride must divide the page size");
   }
   if(config.flip_probability < 0 || config.flip_probability > 1) {
      throw ParameterError("flip probability must lie in [0, 1]");
   }
   const std::uint64_t slots = config.n1 / config.stride;
   if(config.planted > slots) {
      throw ParameterError("more vulnerable cells than stride slots");
   }
   std::mt19937_64 rng(config.seed);
   std::uniform_int_distribution<std::uint64_t> slot(0, slots - 1);
   std::unordered_set<std::uint64_t> used;
   while(m_cells.size() != config.planted) {
      const std::uint64_t s = slot(rng);
      const auto dir = (rng() & 1) ? FlipDirection::one_to_zero : FlipDirection::zero_to_one;
      if(used.insert(s).second) {
         m_cells.push_back(VulnerableCell{s * config.stride, dir});
      }
   }
}

void MemoryModel::plant(VulnerableCell cell) {
   if(cell.address >= m_config.n1 || cell.address % m_config.stride != 0) {
      throw ParameterError("planted cell must be a stride-aligned address inside memory");
   }
   for(const auto& c : m_cells) {
      if(c.address == cell.address) {
         throw ParameterError("address already vulnerable");
      }
   }
   m_cells.push_back(cell);
}

std::vector<VulnerableCell> template_memory(const MemoryModel& model, unsigned passes, bool only_one_to_zero) {
   const auto& cfg = model.config();
   std::mt19937_64 rng(cfg.seed ^ 0x7465'6d70'6c61'7465ULL);
   std::bernoulli_distribution flips(cfg.flip_probability);
   std::vector<VulnerableCell> cells = model.vulnerable();
   std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.address < b.address; });

   // Non-vulnerable cells never flip, so the sweep only needs to visit the
   // planted ones to be exact.
   std::vector<VulnerableCell> found;
   for(const auto& c : cells) {
      bool flipped = false;
      for(unsigned p = 0; p != passes; ++p) {
         flipped = flips(rng) || flipped;
      }
      if(flipped && (!only_one_to_zero || c.direction == FlipDirection::one_to_zero)) {
         found.push_back(c);
      }
   }
   return found;
}

Rational collision_probability(std::uint64_t n, std::uint64_t n1) {
   if(n1 == 0) {
      throw ParameterError("N1 must be positive");
   }
   if(n > n1) {
      throw ParameterError("N cannot exceed N1");
   }
   if(n1 > std::numeric_limits<std::uint32_t>::max()) {
      throw ParameterError("N1 too large for an exact fraction");
   }
   if(n == 0) {
      return Rational{0, 1};
   }
   return Rational::make(n, n1 * n1);
}

MonteCarloResult collision_monte_carlo(std::uint64_t n, std::uint64_t n1, std::uint64_t trials, std::uint64_t seed) {
   if(n1 == 0 || n > n1) {
      throw ParameterError("need 0 <= N <= N1 and N1 > 0");
   }
   std::mt19937_64 rng(seed);
   std::uniform_int_distribution<std::uint64_t> addr(0, n1 - 1);

   std::vector<bool> vulnerable(n1, false);
   for(std::size_t planted = 0; planted != n;) {
      const auto a = addr(rng);
      if(!vulnerable[a]) {
         vulnerable[a] = true;
         ++planted;
      }
   }
   MonteCarloResult r{trials, 0};
   for(std::uint64_t i = 0; i != trials; ++i) {
      const auto flag = addr(rng);
      const auto hammered = addr(rng);
      r.hits += hammered == flag && vulnerable[hammered];
   }
   return r;
}

double LatencyModel::sample(std::mt19937_64& rng) const {
   if(mean_ms <= 0 || cap_ms <= 0) {
      throw ParameterError("latency mean and cap must be positive");
   }
   const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
   const double x = -mean_ms * std::log1p(-u * -std::expm1(-cap_ms / mean_ms));
   return std::min(x, cap_ms);
}

FaultPlan::FaultPlan(std::vector<VulnerableCell> templated, std::uint32_t page_size, const FaultPlanConfig& config) :
      m_templated(std::move(templated)), m_page_size(page_size), m_config(config), m_rng(config.seed) {
   if(page_size == 0 || config.flag_offset >= page_size) {
      throw ParameterError("flag offset must lie inside a page");
   }
   for(double p : {config.placement_probability, config.flip_probability}) {
      if(p < 0 || p > 1) {
         throw ParameterError("probabilities must lie in [0, 1]");
      }
   }
}

PlacementOutcome FaultPlan::place_victim() {
   if(m_state != State::templated) {
      throw StateError("victim already placed");
   }
   const auto it = std::find_if(m_templated.begin(), m_templated.end(), [&](const VulnerableCell& c) {
      return c.direction == FlipDirection::one_to_zero && c.address % m_page_size == m_config.flag_offset;
   });
   if(it == m_templated.end()) {
      throw PlacementImpossible("no templated 1->0 cell at page offset " + std::to_string(m_config.flag_offset));
   }
   const bool placed = std::bernoulli_distribution(m_config.placement_probability)(m_rng);
   if(placed) {
      m_state = State::placed;
   }
   return PlacementOutcome{placed, *it};
}

void FaultPlan::arm() {
   if(m_state != State::placed) {
      throw StateError("arming needs a placed victim");
   }
   m_state = State::armed;
}

FlipResult FaultPlan::induce_flip() {
   if(m_state != State::armed) {
      throw StateError("fault plan is not armed");
   }
   const double latency = m_config.latency.sample(m_rng);
   const bool ok = std::bernoulli_distribution(m_config.flip_probability)(m_rng);
   m_inductions++;
   m_flips += ok;
   m_total_latency += latency;
   m_max_latency = std::max(m_max_latency, latency);
   return FlipResult{ok, latency};
}

void RowhammerInjector::induce() {
   for(std::uint64_t attempt = 0; attempt != m_max_attempts; ++attempt) {
      if(m_plan.induce_flip().success) {
         m_faults++;
         return;
      }
   }
   throw StateError("flag did not flip within " + std::to_string(m_max_attempts) + " attempts");
}

}  // namespace kemfault
