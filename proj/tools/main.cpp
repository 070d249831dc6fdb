/*
 * kemfault command line
 */

#include "commands.hpp"

#include <kemfault/error.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace kemfault;

int main(int argc, char** argv) {
   CLI::App app{"Fault-assisted chosen-ciphertext key recovery against Kyber and Saber"};
   app.require_subcommand(1);

   std::string scheme = "kyber768";
   std::string oracle = "matched";
   std::string probe = "sign-normalized";
   std::string predict_case = "average";
   std::optional<std::uint64_t> seed;
   cli::Output out;
   std::string json_path;
   std::string csv_path;

   cli::AttackSpec attack;
   auto* a = app.add_subcommand("attack", "run a key recovery campaign");
   a->add_option("--scheme", scheme, "scheme id")->capture_default_str();
   a->add_option("--t", attack.ts, "parallelization factor(s), comma separated")->delimiter(',')->required();
   a->add_option("--mode", oracle, "oracle mode: ideal or matched")->capture_default_str();
   a->add_option("--probe-mode", probe, "sign-normalized or paper-literal")->capture_default_str();
   a->add_option("--trials", attack.trials, "number of random victim keys")->capture_default_str();
   a->add_option("--seed", seed, "campaign seed")->required();
   a->add_flag("--faultsim", attack.faultsim, "back every fault with a simulated Rowhammer flip");
   a->add_option("--latency-mean", attack.latency.mean_ms, "mean flip latency in ms")->capture_default_str();
   a->add_option("--latency-cap", attack.latency.cap_ms, "flip latency cap in ms")->capture_default_str();
   a->add_option("--jobs", attack.jobs, "worker threads")->capture_default_str();
   a->add_option("--out", json_path, "JSON report path");
   a->add_option("--csv", csv_path, "per-trial CSV path");

   cli::PredictSpec predict;
   auto* p = app.add_subcommand("predict", "closed-form query counts");
   p->add_option("--scheme", scheme, "scheme id")->capture_default_str();
   p->add_option("--t", predict.ts, "parallelization factor(s), comma separated")->delimiter(',')->required();
   p->add_option("--case", predict_case, "best, average or both")->capture_default_str();
   p->add_flag("--json", predict.json, "JSON output");

   cli::TablesSpec tables;
   auto* tb = app.add_subcommand("tables", "probe response table");
   tb->add_option("--scheme", scheme, "scheme id")->capture_default_str();
   tb->add_flag("--json", tables.json, "JSON output");

   cli::SimulateSpec sim;
   std::uint64_t sim_seed = 0;
   auto* s = app.add_subcommand("simulate", "Rowhammer templating, placement and fault budget");
   s->add_option("--n1", sim.memory.n1, "addressable bytes")->capture_default_str();
   s->add_option("--planted", sim.memory.planted, "random vulnerable cells")->capture_default_str();
   s->add_option("--stride", sim.memory.stride, "templating stride in bytes")->capture_default_str();
   s->add_option("--page-size", sim.memory.page_size, "page size in bytes")->capture_default_str();
   s->add_option("--flip-probability", sim.plan.flip_probability, "per-induction flip chance")->capture_default_str();
   s->add_option("--placement-probability", sim.plan.placement_probability, "page reuse chance")
      ->capture_default_str();
   s->add_option("--passes", sim.passes, "hammer passes while templating")->capture_default_str();
   s->add_option("--flag-offset", sim.plan.flag_offset, "in-page offset of the victim flag")->capture_default_str();
   s->add_flag("--plant-at-flag,!--no-plant-at-flag", sim.plant_at_flag, "plant a 1->0 cell at the flag offset");
   s->add_option("--latency-mean", sim.plan.latency.mean_ms, "mean flip latency in ms")->capture_default_str();
   s->add_option("--latency-cap", sim.plan.latency.cap_ms, "flip latency cap in ms")->capture_default_str();
   s->add_option("--inductions", sim.inductions, "faults to deliver")->capture_default_str();
   s->add_option("--mc-trials", sim.mc_trials, "collision Monte Carlo trials")->capture_default_str();
   s->add_option("--mc-n1", sim.mc_n1, "Monte Carlo N1")->capture_default_str();
   s->add_option("--mc-n", sim.mc_n, "Monte Carlo N")->capture_default_str();
   s->add_option("--seed", sim_seed, "model seed")->capture_default_str();
   s->add_option("--out", json_path, "JSON report path");

   cli::KeygenSpec keygen;
   auto* k = app.add_subcommand("keygen", "emit a victim keypair");
   k->add_option("--scheme", scheme, "scheme id")->capture_default_str();
   k->add_option("--seed", seed, "key seed")->required();
   k->add_option("--out", keygen.out, "secret key path");
   k->add_option("--pk-out", keygen.pk_out, "public key path");

   cli::ReportSpec rep;
   auto* r = app.add_subcommand("report", "aggregate attack reports");
   r->add_option("inputs", rep.inputs, "attack JSON reports")->required()->check(CLI::ExistingFile);
   r->add_option("--out", json_path, "JSON report path");
   r->add_option("--csv", csv_path, "per-trial CSV path");

   try {
      app.parse(argc, argv);
   } catch(const CLI::ParseError& e) {
      return app.exit(e) == 0 ? cli::Exit::ok : cli::Exit::usage;
   }
   if(!json_path.empty()) {
      out.json_path = json_path;
   }
   if(!csv_path.empty()) {
      out.csv_path = csv_path;
   }

   try {
      if(*a) {
         attack.scheme = parse_scheme_id(scheme);
         attack.oracle = parse_oracle_mode(oracle);
         attack.probe = parse_probe_mode(probe);
         attack.seed = *seed;
         return cli::run_attack(attack, out);
      }
      if(*p) {
         predict.scheme = parse_scheme_id(scheme);
         if(predict_case != "both") {
            predict.which = parse_predict_case(predict_case);
         }
         return cli::run_predict(predict);
      }
      if(*tb) {
         tables.scheme = parse_scheme_id(scheme);
         return cli::run_tables(tables);
      }
      if(*s) {
         sim.memory.seed = sim_seed;
         sim.plan.seed = sim_seed;
         return cli::run_simulate(sim, out);
      }
      if(*k) {
         keygen.scheme = parse_scheme_id(scheme);
         keygen.seed = *seed;
         return cli::run_keygen(keygen);
      }
      return cli::run_report(rep, out);
   } catch(const ParameterError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::Exit::usage;
   } catch(const NoProbeError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::Exit::usage;
   } catch(const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::Exit::trial_failure;
   }
}
