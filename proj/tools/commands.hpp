/*
 * kemfault subcommands
 */

#ifndef KEMFAULT_TOOLS_COMMANDS_HPP_
#define KEMFAULT_TOOLS_COMMANDS_HPP_

#include <kemfault/attack.hpp>
#include <kemfault/faultsim.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kemfault::cli {

inline constexpr int report_schema_version = 1;

/// Process exit codes.
enum Exit : int { ok = 0, trial_failure = 1, usage = 2 };

struct Output {
      std::optional<std::string> json_path;
      std::optional<std::string> csv_path;
      bool json_to_stdout = false;
};

struct AttackSpec {
      SchemeId scheme = SchemeId::kyber768;
      std::vector<std::size_t> ts;
      OracleMode oracle = OracleMode::matched;
      ProbeMode probe = ProbeMode::sign_normalized;
      std::size_t trials = 1;
      std::uint64_t seed = 0;
      bool faultsim = false;
      LatencyModel latency;
      unsigned jobs = 1;
};

struct PredictSpec {
      SchemeId scheme = SchemeId::kyber768;
      std::vector<std::size_t> ts;
      std::optional<PredictCase> which;  // both when empty
      bool json = false;
};

struct TablesSpec {
      SchemeId scheme = SchemeId::kyber768;
      bool json = false;
};

struct SimulateSpec {
      MemoryConfig memory;
      unsigned passes = 1;
      bool plant_at_flag = true;
      FaultPlanConfig plan;
      std::uint64_t inductions = 57;
      std::uint64_t mc_trials = 0;
      std::uint64_t mc_n1 = 1024;
      std::uint64_t mc_n = 4;
};

struct KeygenSpec {
      SchemeId scheme = SchemeId::kyber768;
      std::uint64_t seed = 0;
      std::optional<std::string> out;
      std::optional<std::string> pk_out;
};

struct ReportSpec {
      std::vector<std::string> inputs;
};

int run_attack(const AttackSpec& spec, const Output& out);
int run_predict(const PredictSpec& spec);
int run_tables(const TablesSpec& spec);
int run_simulate(const SimulateSpec& spec, const Output& out);
int run_keygen(const KeygenSpec& spec);
int run_report(const ReportSpec& spec, const Output& out);

/// Relative paths are placed under $KEMFAULT_OUTPUT_DIR when it is set.
std::string resolve_output_path(const std::string& path);

}  // namespace kemfault::cli

#endif
