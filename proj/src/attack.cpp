/*
 * Key recovery driver
 */

#include <kemfault/attack.hpp>

#include <kemfault/error.hpp>

#include <algorithm>
#include <string>

namespace kemfault {

std::string_view to_string(ProbeMode mode) {
   return mode == ProbeMode::sign_normalized ? "sign-normalized" : "paper-literal";
}

ProbeMode parse_probe_mode(std::string_view name) {
   if(name == "sign-normalized") {
      return ProbeMode::sign_normalized;
   }
   if(name == "paper-literal") {
      return ProbeMode::paper_literal;
   }
   throw ParameterError("unknown probe mode '" + std::string(name) + "'");
}

std::string_view to_string(PredictCase c) {
   return c == PredictCase::best ? "best" : "average";
}

PredictCase parse_predict_case(std::string_view name) {
   if(name == "best") {
      return PredictCase::best;
   }
   if(name == "average") {
      return PredictCase::average;
   }
   throw ParameterError("unknown prediction case '" + std::string(name) + "'");
}

SecretState::SecretState(std::size_t l, std::size_t n) : m_l(l), m_n(n), m_node(l * n, 0), m_sign(l * n, 1) {}

void SecretState::set_sign(std::size_t poly, std::size_t j, int sign) {
   if(sign != 1 && sign != -1) {
      throw ParameterError("probe sign must be +1 or -1");
   }
   m_sign.at(poly * m_n + j) = sign;
}

void SecretState::descend(const PrunedTree& tree, std::size_t poly, std::size_t j, unsigned bit) {
   int& id = m_node.at(poly * m_n + j);
   id = tree.child(id, bit);
}

std::optional<int> SecretState::variable(const PrunedTree& tree, std::size_t poly, std::size_t j) const {
   const auto& n = tree.node(node(poly, j));
   if(!n.is_leaf()) {
      return std::nullopt;
   }
   return n.set.front();
}

std::optional<int> SecretState::value(const PrunedTree& tree, std::size_t poly, std::size_t j) const {
   const auto v = variable(tree, poly, j);
   if(!v) {
      return std::nullopt;
   }
   return *v * sign(poly, j);
}

namespace {

void check_poly(const SchemeParams& params, std::size_t poly) {
   if(poly >= params.l) {
      throw ParameterError("polynomial index " + std::to_string(poly) + " out of range");
   }
}

std::uint32_t signed_k_u(const SchemeParams& params, std::uint32_t k_u, int sign) {
   return sign > 0 ? k_u : negate_k_u(params, k_u);
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
   return (a + b - 1) / b;
}

}  // namespace

Ciphertext craft_block_ct(const SchemeParams& params,
                          std::size_t poly,
                          std::size_t block_start,
                          std::span<const std::uint32_t> probes,
                          std::uint32_t k_u,
                          std::uint32_t v_filler,
                          ProbeMode mode) {
   check_poly(params, poly);
   const std::size_t n = params.n;
   if(block_start >= n || probes.empty() || probes.size() > n - block_start) {
      throw ParameterError("block does not fit in the ring");
   }
   if(v_filler >= params.v_domain()) {
      throw ParameterError("v filler outside the ciphertext domain");
   }
   Ciphertext ct = Ciphertext::zero(params);
   const int sign = (mode == ProbeMode::sign_normalized && block_start > 0) ? -1 : 1;
   ct.u[poly][(n - block_start) % n] = signed_k_u(params, k_u, sign);
   std::fill(ct.v.begin(), ct.v.end(), v_filler);
   std::copy(probes.begin(), probes.end(), ct.v.begin());
   ct.validate(params);
   return ct;
}

void reduce_secret_sets(SecretState& state,
                        const PrunedTree& tree,
                        std::size_t poly,
                        std::size_t block_start,
                        std::size_t count,
                        const Message& response) {
   for(std::size_t j = 0; j != count; ++j) {
      const auto& node = tree.node(state.node(poly, block_start + j));
      const unsigned bit = response.bit(j) ? 1 : 0;
      if(node.is_leaf() || node.pruned) {
         if(bit != 0) {
            throw StateError("filler position " + std::to_string(j) + " answered 1");
         }
         continue;
      }
      state.descend(tree, poly, block_start + j, bit);
   }
}

std::vector<IndexClass> collect_index_set(const SecretState& state, const PrunedTree& tree) {
   std::vector<IndexClass> out;
   for(std::size_t i = 0; i != state.l(); ++i) {
      for(int sign : {1, -1}) {
         IndexClass c{i, sign, {}};
         for(std::size_t j = 0; j != state.n(); ++j) {
            if(state.sign(i, j) == sign && !tree.node(state.node(i, j)).is_leaf()) {
               c.positions.push_back(j);
            }
         }
         if(!c.positions.empty()) {
            out.push_back(std::move(c));
         }
      }
   }
   return out;
}

std::optional<Ciphertext> craft_index_ct(const SchemeParams& params,
                                         std::size_t poly,
                                         std::span<const std::size_t> positions,
                                         std::span<const std::uint32_t> probes,
                                         std::uint32_t k_u_index,
                                         std::uint32_t v_filler,
                                         int sign) {
   check_poly(params, poly);
   if(positions.size() != probes.size()) {
      throw ParameterError("one probe per index position is required");
   }
   if(positions.empty()) {
      return std::nullopt;
   }
   if(sign != 1 && sign != -1) {
      throw ParameterError("probe sign must be +1 or -1");
   }
   Ciphertext ct = Ciphertext::zero(params);
   ct.u[poly][0] = signed_k_u(params, k_u_index, sign);
   std::fill(ct.v.begin(), ct.v.end(), v_filler);
   for(std::size_t k = 0; k != positions.size(); ++k) {
      if(positions[k] >= params.n) {
         throw ParameterError("index position out of range");
      }
      ct.v[positions[k]] = probes[k];
   }
   ct.validate(params);
   return ct;
}

std::vector<int> reorder_secret(std::span<const int> s1, std::size_t t) {
   const std::size_t n = s1.size();
   if(n == 0 || t == 0 || t > n || n % t != 0) {
      throw ParameterError("reordering needs 0 < t <= n with t dividing n");
   }
   std::vector<int> s(n);
   for(std::size_t k = 0; k != t; ++k) {
      s[k] = s1[k];
   }
   for(std::size_t j = 1; j != n / t; ++j) {
      for(std::size_t k = 0; k != t; ++k) {
         s[t * j + k] = -s1[(n - t * j + k) % n];
      }
   }
   return s;
}

std::uint64_t predict_queries(const SchemeParams& params, const PrunedTree& tree, std::size_t t, PredictCase c) {
   if(t == 0) {
      throw ParameterError("t must be positive");
   }
   const std::uint64_t block = ceil_div(params.n, t) * tree.traversal_depth();
   if(c == PredictCase::best) {
      return params.l * block;
   }
   const Rational e1 = expected_residual(params, tree, cbd_distribution(params.secret_eta()));
   return params.l * (block + e1.ceil_div(t));
}

std::uint64_t predict_queries(SchemeId scheme, std::size_t t, PredictCase c) {
   const auto& params = scheme_params(scheme);
   return predict_queries(params, attack_tree(params), t, c);
}

AttackReport recover_key(const AttackConfig& config, Oracle& oracle, const SecretKey* truth) {
   const SchemeParams params = oracle.params();
   const PrunedTree tree = config.tree ? *config.tree : attack_tree(params);
   tree.check_labels(params);
   const std::size_t n = params.n;
   const std::size_t t = config.t;
   if(t == 0 || t > n) {
      throw ParameterError("t must lie in [1, n]");
   }
   if(t > oracle.max_t()) {
      throw ParameterError("t = " + std::to_string(t) + " exceeds the oracle ceiling " +
                           std::to_string(oracle.max_t()));
   }

   const QueryLog before = oracle.log();
   AttackReport report;
   report.scheme = params.id;
   report.t = t;
   report.probe_mode = config.probe_mode;
   report.oracle_mode = oracle.mode();

   SecretState state(params.l, n);
   const unsigned depth = tree.traversal_depth();
   const std::uint32_t filler = tree.v_filler();

   for(std::size_t i = 0; i != params.l; ++i) {
      for(std::size_t start = 0; start < n; start += t) {
         const std::size_t count = std::min(t, n - start);
         if(config.probe_mode == ProbeMode::paper_literal && start > 0) {
            for(std::size_t j = 0; j != count; ++j) {
               state.set_sign(i, start + j, -1);
            }
         }
         std::vector<std::size_t> positions(count);
         for(std::size_t j = 0; j != count; ++j) {
            positions[j] = j;
         }
         const CandidateSet cands(n, positions);
         std::vector<std::uint32_t> probes(count);
         for(unsigned round = 0; round != depth; ++round) {
            for(std::size_t j = 0; j != count; ++j) {
               const auto& node = tree.node(state.node(i, start + j));
               probes[j] = (node.is_leaf() || node.pruned) ? filler : *node.d;
            }
            const Ciphertext ct =
               craft_block_ct(params, i, start, probes, tree.level_k_u()[round], filler, config.probe_mode);
            const auto r = oracle.query(ct, cands);
            reduce_secret_sets(state, tree, i, start, count, cands.message(r));
            report.block_queries++;
         }
      }
   }

   report.index_sizes.assign(params.l, 0);
   const auto classes = collect_index_set(state, tree);
   for(const auto& cls : classes) {
      report.index_sizes[cls.poly] += cls.positions.size();
      for(std::size_t off = 0; off < cls.positions.size(); off += t) {
         const std::size_t count = std::min(t, cls.positions.size() - off);
         const std::vector<std::size_t> positions(cls.positions.begin() + off, cls.positions.begin() + off + count);
         std::vector<std::uint32_t> probes;
         for(auto j : positions) {
            probes.push_back(*tree.node(state.node(cls.poly, j)).d);
         }
         const auto ct = craft_index_ct(params, cls.poly, positions, probes, tree.k_u_index(), filler, cls.sign);
         const CandidateSet cands(n, positions);
         const Message m = cands.message(oracle.query(*ct, cands));
         for(std::size_t k = 0; k != count; ++k) {
            state.descend(tree, cls.poly, positions[k], m.bit(positions[k]) ? 1 : 0);
         }
         report.index_queries++;
      }
      report.identity_queries += ceil_div(cls.positions.size(), t);
   }
   report.identity_queries += std::uint64_t(params.l) * depth * ceil_div(n, t);

   const bool reorder = config.probe_mode == ProbeMode::paper_literal && n % t == 0;
   for(std::size_t i = 0; i != params.l; ++i) {
      std::vector<int> coeffs(n);
      std::vector<int> s1(n);
      for(std::size_t j = 0; j != n; ++j) {
         const auto var = state.variable(tree, i, j);
         if(!var) {
            throw IncompleteRecovery("coefficient " + std::to_string(j) + " of polynomial " + std::to_string(i) +
                                     " unresolved after the index phase");
         }
         coeffs[j] = *var * state.sign(i, j);
         const std::size_t start = j - j % t;
         s1[(n - start + j % t) % n] = *var;
      }
      report.recovered.push_back(reorder ? reorder_secret(s1, t) : coeffs);
   }

   const QueryLog& after = oracle.log();
   report.queries = after.queries - before.queries;
   report.faults = after.faults - before.faults;
   report.offline_hashes = after.offline_hashes - before.offline_hashes;
   report.predicted_best = predict_queries(params, tree, t, PredictCase::best);
   report.predicted_average = predict_queries(params, tree, t, PredictCase::average);

   if(truth != nullptr) {
      bool ok = truth->scheme == params.id && truth->s.size() == params.l;
      for(std::size_t i = 0; ok && i != params.l; ++i) {
         const auto expected = truth->s[i].to_signed();
         ok = std::equal(expected.begin(), expected.end(), report.recovered[i].begin(), report.recovered[i].end());
      }
      report.success = ok;
   }
   return report;
}

}  // namespace kemfault
