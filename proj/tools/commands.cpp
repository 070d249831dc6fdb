/*
 * kemfault subcommands
 */

#include "commands.hpp"

#include <kemfault/error.hpp>
#include <kemfault/serialize.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace kemfault::cli {

namespace {

using json = nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
   const std::filesystem::path p = resolve_output_path(path);
   if(p.has_parent_path()) {
      std::filesystem::create_directories(p.parent_path());
   }
   std::ofstream f(p, std::ios::binary);
   if(!f) {
      throw std::runtime_error("cannot write " + p.string());
   }
   f << content;
}

void emit_json(const json& j, const Output& out) {
   const std::string text = j.dump(2) + "\n";
   if(out.json_path) {
      write_file(*out.json_path, text);
   }
   if(!out.json_path || out.json_to_stdout) {
      std::cout << text;
   }
}

template <typename T>
json summary(const std::vector<T>& xs) {
   if(xs.empty()) {
      return json{{"mean", nullptr}, {"min", nullptr}, {"max", nullptr}};
   }
   double sum = 0;
   for(auto x : xs) {
      sum += double(x);
   }
   return json{{"mean", sum / double(xs.size())},
               {"min", *std::min_element(xs.begin(), xs.end())},
               {"max", *std::max_element(xs.begin(), xs.end())}};
}

std::uint64_t seed_u64(const Seed& s) {
   std::uint64_t v = 0;
   for(int i = 7; i >= 0; --i) {
      v = (v << 8) | s.bytes[i];
   }
   return v;
}

std::string join(const std::vector<std::size_t>& xs) {
   std::ostringstream out;
   for(std::size_t i = 0; i != xs.size(); ++i) {
      out << (i ? ", " : "") << xs[i];
   }
   return out.str();
}

// Memory with the flag's page offset guaranteed to hold a 1->0 cell, so
// placement always succeeds.
FaultPlan armed_plan(std::uint64_t seed, const LatencyModel& latency) {
   MemoryConfig mc;
   mc.seed = seed;
   MemoryModel model(mc);
   FaultPlanConfig pc;
   pc.seed = seed ^ 0x5eed;
   pc.latency = latency;
   const std::uint64_t pages = mc.n1 / mc.page_size;
   for(std::uint64_t page = seed % pages;; page = (page + 1) % pages) {
      try {
         model.plant(VulnerableCell{page * mc.page_size + pc.flag_offset, FlipDirection::one_to_zero});
         break;
      } catch(const ParameterError&) {
      }
   }
   FaultPlan plan(template_memory(model, 1), mc.page_size, pc);
   if(!plan.place_victim().placed) {
      throw StateError("victim placement failed");
   }
   plan.arm();
   return plan;
}

struct TrialRecord {
      std::size_t index = 0;
      std::optional<AttackReport> report;
      std::optional<FaultPlan> plan;
      std::string error;

      bool success() const { return report && report->success == true; }
};

TrialRecord run_trial(const SchemeParams& params, const PrunedTree& tree, const AttackSpec& spec, std::size_t t, std::size_t k) {
   TrialRecord rec;
   rec.index = k;
   try {
      const Seed trial_seed = Seed::from_u64(spec.seed).derive("trial", k);
      const KemKeyPair victim = kem_keygen(params, trial_seed);
      AttackConfig cfg;
      cfg.t = t;
      cfg.probe_mode = spec.probe;
      cfg.tree = tree;

      std::optional<RowhammerInjector> injector;
      FaultController fc(FaultController::Mode::force_pass);
      if(spec.faultsim) {
         rec.plan.emplace(armed_plan(seed_u64(trial_seed.derive("faultsim")), spec.latency));
         injector.emplace(*rec.plan);
         fc = FaultController(FaultController::Mode::force_pass, &*injector);
      }
      Oracle oracle(params, victim, spec.oracle, spec.oracle == OracleMode::matched ? &fc : nullptr);
      rec.report = recover_key(cfg, oracle, &victim.sk());
   } catch(const std::exception& e) {
      rec.error = e.what();
   }
   return rec;
}

std::vector<TrialRecord> run_trials(const SchemeParams& params, const PrunedTree& tree, const AttackSpec& spec, std::size_t t) {
   std::vector<TrialRecord> records(spec.trials);
   std::atomic<std::size_t> next{0};
   auto worker = [&] {
      for(std::size_t k = next++; k < spec.trials; k = next++) {
         records[k] = run_trial(params, tree, spec, t, k);
      }
   };
   const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, unsigned(spec.trials)));
   std::vector<std::thread> pool;
   for(unsigned i = 1; i < jobs; ++i) {
      pool.emplace_back(worker);
   }
   worker();
   for(auto& th : pool) {
      th.join();
   }
   return records;
}

json trial_json(const TrialRecord& rec) {
   json j;
   j["index"] = rec.index;
   j["success"] = rec.success();
   if(rec.report) {
      const auto& r = *rec.report;
      j["queries"] = r.queries;
      j["block_queries"] = r.block_queries;
      j["index_queries"] = r.index_queries;
      j["identity_queries"] = r.identity_queries;
      j["faults"] = r.faults;
      j["offline_hashes"] = r.offline_hashes;
      j["index_sizes"] = r.index_sizes;
   }
   if(rec.plan) {
      j["fault_inductions"] = rec.plan->inductions();
      j["fault_latency_ms"] = json{{"total", rec.plan->total_latency_ms()}, {"max", rec.plan->max_latency_ms()}};
   }
   if(!rec.error.empty()) {
      j["error"] = rec.error;
   }
   return j;
}

json aggregate_json(const json& trials) {
   std::vector<std::uint64_t> queries, faults, hashes;
   std::vector<std::size_t> index_sizes;
   std::vector<std::size_t> failures;
   for(const auto& tr : trials) {
      if(!tr.at("success").get<bool>()) {
         failures.push_back(tr.at("index").get<std::size_t>());
      }
      if(tr.contains("queries")) {
         queries.push_back(tr.at("queries").get<std::uint64_t>());
         faults.push_back(tr.at("faults").get<std::uint64_t>());
         hashes.push_back(tr.at("offline_hashes").get<std::uint64_t>());
         for(const auto& s : tr.at("index_sizes")) {
            index_sizes.push_back(s.get<std::size_t>());
         }
      }
   }
   return json{{"trials", trials.size()},
               {"successes", trials.size() - failures.size()},
               {"failures", failures},
               {"queries", summary(queries)},
               {"faults", summary(faults)},
               {"offline_hashes", summary(hashes)},
               {"index_size_per_poly", summary(index_sizes)}};
}

json constants_json(const SchemeParams& params, const PrunedTree& tree) {
   const Rational e1 = expected_residual(params, tree, cbd_distribution(params.secret_eta()));
   return json{{"n", params.n},
               {"l", params.l},
               {"q", params.q},
               {"traversal_depth", tree.traversal_depth()},
               {"level_k_u", tree.level_k_u()},
               {"k_u_index", tree.k_u_index()},
               {"v_filler", tree.v_filler()},
               {"pruned_values", tree.pruned_values()},
               {"expected_residual", json{{"num", e1.num}, {"den", e1.den}}}};
}

const char* csv_header = "scheme,t,trial,success,queries,block_queries,index_queries,faults,offline_hashes\n";

void csv_rows(std::ostream& out, const std::string& scheme, std::uint64_t t, const json& trials) {
   for(const auto& tr : trials) {
      out << scheme << ',' << t << ',' << tr.at("index").get<std::size_t>() << ','
          << (tr.at("success").get<bool>() ? 1 : 0);
      for(const char* key : {"queries", "block_queries", "index_queries", "faults", "offline_hashes"}) {
         out << ',';
         if(tr.contains(key)) {
            out << tr.at(key).get<std::uint64_t>();
         }
      }
      out << '\n';
   }
}

json read_json_file(const std::string& path) {
   std::ifstream f(path, std::ios::binary);
   if(!f) {
      throw ParameterError("cannot read " + path);
   }
   try {
      return json::parse(f);
   } catch(const json::exception& e) {
      throw ParameterError(path + ": " + e.what());
   }
}

}  // namespace

std::string resolve_output_path(const std::string& path) {
   const std::filesystem::path p(path);
   const char* dir = std::getenv("KEMFAULT_OUTPUT_DIR");
   if(dir != nullptr && *dir != '\0' && p.is_relative()) {
      return (std::filesystem::path(dir) / p).string();
   }
   return path;
}

int run_attack(const AttackSpec& spec, const Output& out) {
   const auto& params = scheme_params(spec.scheme);
   if(spec.ts.empty() || spec.trials == 0) {
      throw ParameterError("attack needs at least one t and one trial");
   }
   if(spec.faultsim && spec.oracle != OracleMode::matched) {
      throw ParameterError("--faultsim needs the matched oracle");
   }
   const std::size_t ceiling = spec.oracle == OracleMode::ideal ? default_max_t_ideal : default_max_t_matched;
   for(auto t : spec.ts) {
      if(t == 0 || t > params.n || t > ceiling) {
         throw ParameterError("t = " + std::to_string(t) + " outside [1, " +
                              std::to_string(std::min<std::size_t>(params.n, ceiling)) + "] for the " +
                              std::string(to_string(spec.oracle)) + " oracle");
      }
   }
   const PrunedTree tree = attack_tree(params);

   json report;
   report["schema_version"] = report_schema_version;
   report["command"] = "attack";
   json run{{"scheme", params.name()},
            {"oracle_mode", to_string(spec.oracle)},
            {"probe_mode", to_string(spec.probe)},
            {"trials", spec.trials},
            {"seed", spec.seed},
            {"faultsim", spec.faultsim}};
   if(spec.faultsim) {
      run["latency_ms"] = json{{"mean", spec.latency.mean_ms}, {"cap", spec.latency.cap_ms}};
   }
   report["run"] = run;
   report["constants"] = constants_json(params, tree);

   std::ostringstream csv;
   csv << csv_header;
   bool all_ok = true;
   json runs = json::array();
   for(auto t : spec.ts) {
      const auto records = run_trials(params, tree, spec, t);
      json trials = json::array();
      for(const auto& rec : records) {
         trials.push_back(trial_json(rec));
      }
      json r;
      r["t"] = t;
      r["predicted"] = json{{"best", predict_queries(params, tree, t, PredictCase::best)},
                            {"average", predict_queries(params, tree, t, PredictCase::average)}};
      r["aggregate"] = aggregate_json(trials);
      r["trials"] = trials;

      const auto failures = r["aggregate"]["failures"].get<std::vector<std::size_t>>();
      if(!failures.empty()) {
         all_ok = false;
         std::cerr << params.name() << " t=" << t << ": failing trials " << join(failures) << "\n";
         for(const auto& rec : records) {
            if(!rec.error.empty()) {
               std::cerr << "  trial " << rec.index << ": " << rec.error << "\n";
            }
         }
      }
      if(out.json_path) {
         const auto& agg = r["aggregate"];
         std::cout << params.name() << " t=" << t << " " << to_string(spec.oracle) << ": "
                   << agg["successes"].get<std::size_t>() << "/" << spec.trials << " recovered, mean queries "
                   << std::fixed << std::setprecision(2) << agg["queries"]["mean"].get<double>() << " (predicted "
                   << r["predicted"]["average"].get<std::uint64_t>() << ")\n";
      }
      csv_rows(csv, std::string(params.name()), t, trials);
      runs.push_back(std::move(r));
   }
   report["runs"] = runs;
   report["success"] = all_ok;

   emit_json(report, out);
   if(out.csv_path) {
      write_file(*out.csv_path, csv.str());
   }
   return all_ok ? Exit::ok : Exit::trial_failure;
}

int run_predict(const PredictSpec& spec) {
   const auto& params = scheme_params(spec.scheme);
   if(spec.ts.empty()) {
      throw ParameterError("predict needs at least one t");
   }
   const PrunedTree tree = attack_tree(params);
   std::vector<PredictCase> cases;
   if(spec.which) {
      cases.push_back(*spec.which);
   } else {
      cases = {PredictCase::best, PredictCase::average};
   }

   if(spec.json) {
      json rows = json::array();
      for(auto t : spec.ts) {
         json row{{"t", t}};
         for(auto c : cases) {
            row[std::string(to_string(c))] = predict_queries(params, tree, t, c);
         }
         rows.push_back(row);
      }
      json j{{"schema_version", report_schema_version},
             {"command", "predict"},
             {"scheme", params.name()},
             {"constants", constants_json(params, tree)},
             {"predictions", rows}};
      std::cout << j.dump(2) << "\n";
      return Exit::ok;
   }

   if(spec.ts.size() == 1 && cases.size() == 1) {
      std::cout << predict_queries(params, tree, spec.ts[0], cases[0]) << "\n";
      return Exit::ok;
   }
   std::cout << std::setw(6) << "t";
   for(auto c : cases) {
      std::cout << std::setw(10) << to_string(c);
   }
   std::cout << "\n";
   for(auto t : spec.ts) {
      std::cout << std::setw(6) << t;
      for(auto c : cases) {
         std::cout << std::setw(10) << predict_queries(params, tree, t, c);
      }
      std::cout << "\n";
   }
   return Exit::ok;
}

int run_tables(const TablesSpec& spec) {
   const auto& params = scheme_params(spec.scheme);
   const ProbeTable table =
      has_canonical_table(spec.scheme) ? canonical_table(spec.scheme).table : probe_table(params, attack_tree(params));
   const std::size_t cells = table.secrets.size() * table.columns.size();
   const bool has_reference = !table.reference.empty();
   const std::size_t bad = has_reference ? table.mismatches() : 0;

   if(spec.json) {
      json cols = json::array();
      for(const auto& c : table.columns) {
         cols.push_back(json{{"label", c.label}, {"k_u", c.k_u}, {"d", c.d}});
      }
      json rows = json::array();
      for(std::size_t r = 0; r != table.secrets.size(); ++r) {
         json row{{"s", table.secrets[r]}, {"bits", table.bits[r]}};
         if(has_reference) {
            row["reference"] = table.reference[r];
         }
         rows.push_back(row);
      }
      json j{{"schema_version", report_schema_version},
             {"command", "tables"},
             {"scheme", params.name()},
             {"k_u_block", table.k_u_block},
             {"k_u_index", table.k_u_index},
             {"v_filler", table.v_filler},
             {"columns", cols},
             {"rows", rows},
             {"cells", cells},
             {"reference", has_reference},
             {"mismatches", bad}};
      std::cout << j.dump(2) << "\n";
   } else {
      std::cout << params.name() << "  k_u_block=" << table.k_u_block << " k_u_index=" << table.k_u_index
                << " v_filler=" << table.v_filler << "\n";
      std::vector<std::string> heads;
      std::size_t width = 2;
      for(const auto& c : table.columns) {
         std::string h = c.label + "=" + std::to_string(c.d);
         if(c.k_u != table.k_u_block) {
            h += "(u=" + std::to_string(c.k_u) + ")";
         }
         width = std::max(width, h.size());
         heads.push_back(std::move(h));
      }
      std::cout << std::setw(4) << "s";
      for(const auto& h : heads) {
         std::cout << "  " << std::setw(int(width)) << h;
      }
      std::cout << "\n";
      for(std::size_t r = 0; r != table.secrets.size(); ++r) {
         std::cout << std::setw(4) << table.secrets[r];
         for(std::size_t c = 0; c != table.columns.size(); ++c) {
            std::cout << "  " << std::setw(int(width)) << int(table.bits[r][c]);
         }
         std::cout << "\n";
      }
      if(has_reference) {
         std::cout << "matches: " << cells - bad << "/" << cells << "\n";
      } else {
         std::cout << "derived table, no published reference\n";
      }
   }
   return bad == 0 ? Exit::ok : Exit::trial_failure;
}

int run_simulate(const SimulateSpec& spec, const Output& out) {
   MemoryModel model(spec.memory);
   const auto& mc = model.config();
   if(spec.plant_at_flag) {
      const std::uint64_t pages = mc.n1 / mc.page_size;
      if(pages == 0) {
         throw ParameterError("memory smaller than one page");
      }
      for(std::uint64_t i = 0, page = mc.seed % pages; i != pages; ++i, page = (page + 1) % pages) {
         try {
            model.plant(VulnerableCell{page * mc.page_size + spec.plan.flag_offset, FlipDirection::one_to_zero});
            break;
         } catch(const ParameterError&) {
         }
      }
   }
   const auto all = template_memory(model, spec.passes, false);
   const auto usable = template_memory(model, spec.passes, true);

   json found = json::array();
   for(const auto& c : all) {
      found.push_back(json{{"address", c.address},
                           {"page_offset", model.page_offset(c.address)},
                           {"direction", to_string(c.direction)}});
   }
   json report;
   report["schema_version"] = report_schema_version;
   report["command"] = "simulate";
   report["memory"] = json{{"n1", mc.n1},
                           {"planted", model.vulnerable().size()},
                           {"page_size", mc.page_size},
                           {"stride", mc.stride},
                           {"flip_probability", mc.flip_probability},
                           {"passes", spec.passes},
                           {"seed", mc.seed}};
   report["templating"] = json{{"found", all.size()}, {"one_to_zero", usable.size()}, {"cells", found}};

   json coll{{"n", all.size()}, {"n1", mc.n1}};
   try {
      const Rational p = collision_probability(all.size(), mc.n1);
      coll["num"] = p.num;
      coll["den"] = p.den;
      coll["value"] = p.value();
   } catch(const ParameterError&) {
      coll["value"] = double(all.size()) / (double(mc.n1) * double(mc.n1));
   }
   report["collision_probability"] = coll;

   bool ok = true;
   FaultPlan plan(usable, mc.page_size, spec.plan);
   json placement{{"flag_offset", spec.plan.flag_offset}, {"probability", spec.plan.placement_probability}};
   try {
      const auto outcome = plan.place_victim();
      placement["placed"] = outcome.placed;
      placement["address"] = outcome.cell.address;
      ok = outcome.placed;
   } catch(const PlacementImpossible& e) {
      placement["placed"] = false;
      placement["error"] = e.what();
      ok = false;
   }
   report["placement"] = placement;

   if(ok) {
      plan.arm();
      RowhammerInjector injector(plan);
      for(std::uint64_t i = 0; i != spec.inductions; ++i) {
         injector.induce();
      }
      const double bound = double(spec.inductions) * spec.plan.latency.cap_ms;
      report["fault_budget"] = json{{"faults", injector.faults()},
                                    {"inductions", plan.inductions()},
                                    {"total_latency_ms", plan.total_latency_ms()},
                                    {"max_latency_ms", plan.max_latency_ms()},
                                    {"latency_cap_ms", spec.plan.latency.cap_ms},
                                    {"bound_ms", bound},
                                    {"within_bound", plan.total_latency_ms() <= bound}};
      ok = plan.total_latency_ms() <= bound;
   }

   if(spec.mc_trials > 0) {
      const auto r = collision_monte_carlo(spec.mc_n, spec.mc_n1, spec.mc_trials, mc.seed);
      const double p = double(spec.mc_n) / (double(spec.mc_n1) * double(spec.mc_n1));
      report["monte_carlo"] = json{{"n", spec.mc_n},
                                   {"n1", spec.mc_n1},
                                   {"trials", r.trials},
                                   {"hits", r.hits},
                                   {"rate", r.rate()},
                                   {"expected", p}};
   }
   emit_json(report, out);
   return ok ? Exit::ok : Exit::trial_failure;
}

int run_keygen(const KeygenSpec& spec) {
   const auto& params = scheme_params(spec.scheme);
   const KemKeyPair kp = kem_keygen(params, Seed::from_u64(spec.seed));
   const std::string secret = to_text(kp);
   if(spec.out) {
      write_file(*spec.out, secret);
   } else {
      std::cout << secret;
   }
   if(spec.pk_out) {
      write_file(*spec.pk_out, to_text(kp.pk()));
   }
   return Exit::ok;
}

int run_report(const ReportSpec& spec, const Output& out) {
   if(spec.inputs.empty()) {
      throw ParameterError("report needs at least one input");
   }
   json inputs = json::array();
   std::ostringstream csv;
   csv << csv_header;
   bool all_ok = true;
   std::uint64_t trials = 0;
   std::uint64_t successes = 0;
   for(const auto& path : spec.inputs) {
      const json in = read_json_file(path);
      if(in.value("schema_version", 0) != report_schema_version || in.value("command", "") != "attack") {
         throw ParameterError(path + " is not a version " + std::to_string(report_schema_version) + " attack report");
      }
      const std::string scheme = in.at("run").at("scheme").get<std::string>();
      for(const auto& r : in.at("runs")) {
         const json recomputed = aggregate_json(r.at("trials"));
         const bool consistent = recomputed == r.at("aggregate");
         const auto n = recomputed["trials"].get<std::uint64_t>();
         const auto s = recomputed["successes"].get<std::uint64_t>();
         trials += n;
         successes += s;
         all_ok = all_ok && consistent && n == s;
         inputs.push_back(json{{"path", path},
                               {"scheme", scheme},
                               {"oracle_mode", in.at("run").at("oracle_mode")},
                               {"t", r.at("t")},
                               {"trials", n},
                               {"successes", s},
                               {"queries", recomputed["queries"]},
                               {"predicted_average", r.at("predicted").at("average")},
                               {"consistent", consistent}});
         csv_rows(csv, scheme, r.at("t").get<std::uint64_t>(), r.at("trials"));
      }
   }
   json report{{"schema_version", report_schema_version},
               {"command", "report"},
               {"runs", inputs},
               {"trials", trials},
               {"successes", successes},
               {"success", all_ok}};
   emit_json(report, out);
   if(out.csv_path) {
      write_file(*out.csv_path, csv.str());
   }
   return all_ok ? Exit::ok : Exit::trial_failure;
}

}  // namespace kemfault::cli
