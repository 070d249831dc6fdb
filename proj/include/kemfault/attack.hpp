/*
 * Key recovery driver: block phase, index phase, reordering, prediction
 */

#ifndef KEMFAULT_ATTACK_HPP_
#define KEMFAULT_ATTACK_HPP_

#include <kemfault/oracle.hpp>
#include <kemfault/tree.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kemfault {

/**
 * paper_literal places k_u itself at the rotated u position, so blocks
 * after the first measure -s. sign_normalized places the u-domain
 * negation of k_u there instead and every probe measures +s.
 */
enum class ProbeMode { sign_normalized, paper_literal };

std::string_view to_string(ProbeMode mode);
ProbeMode parse_probe_mode(std::string_view name);

struct AttackConfig {
      std::size_t t = 10;
      ProbeMode probe_mode = ProbeMode::sign_normalized;
      /// Defaults to attack_tree(params).
      std::optional<PrunedTree> tree;
};

/// Per-coefficient position in the decision tree.
class SecretState {
   public:
      SecretState(std::size_t l, std::size_t n);

      std::size_t l() const { return m_l; }

      std::size_t n() const { return m_n; }

      int node(std::size_t poly, std::size_t j) const { return m_node.at(poly * m_n + j); }

      /// +1 when the coefficient's tree variable is s, -1 when it is -s.
      int sign(std::size_t poly, std::size_t j) const { return m_sign.at(poly * m_n + j); }

      void set_sign(std::size_t poly, std::size_t j, int sign);

      /// StateError when the coefficient already sits at a leaf.
      void descend(const PrunedTree& tree, std::size_t poly, std::size_t j, unsigned bit);

      /// Resolved tree variable, if the coefficient reached a leaf.
      std::optional<int> variable(const PrunedTree& tree, std::size_t poly, std::size_t j) const;

      /// Resolved secret coefficient (variable times sign).
      std::optional<int> value(const PrunedTree& tree, std::size_t poly, std::size_t j) const;

   private:
      std::size_t m_l;
      std::size_t m_n;
      std::vector<int> m_node;
      std::vector<int> m_sign;
};

/**
 * Block-phase ciphertext for coefficients block_start .. block_start +
 * probes.size() - 1 of secret polynomial `poly`. Message position j
 * carries probes[j]; every other v coefficient is v_filler.
 */
Ciphertext craft_block_ct(const SchemeParams& params,
                          std::size_t poly,
                          std::size_t block_start,
                          std::span<const std::uint32_t> probes,
                          std::uint32_t k_u,
                          std::uint32_t v_filler,
                          ProbeMode mode);

/// Descends every coefficient of the block that sits at an internal
/// unpruned node. Other positions must answer 0.
void reduce_secret_sets(SecretState& state,
                        const PrunedTree& tree,
                        std::size_t poly,
                        std::size_t block_start,
                        std::size_t count,
                        const Message& response);

struct IndexClass {
      std::size_t poly;
      int sign;
      std::vector<std::size_t> positions;
};

/// Unresolved coefficients grouped by polynomial, then sign (+1 first).
std::vector<IndexClass> collect_index_set(const SecretState& state, const PrunedTree& tree);

/**
 * Index-phase ciphertext: u[poly][0] = sign * k_u_index (u-domain
 * negation for sign -1), v[positions[k]] = probes[k], filler elsewhere.
 * Nothing when positions is empty.
 */
std::optional<Ciphertext> craft_index_ct(const SchemeParams& params,
                                         std::size_t poly,
                                         std::span<const std::size_t> positions,
                                         std::span<const std::uint32_t> probes,
                                         std::uint32_t k_u_index,
                                         std::uint32_t v_filler,
                                         int sign);

/// s[t j + k] = -s1[(n - t j + k) % n] for blocks j > 0; block 0 is copied.
/// Requires t | n.
std::vector<int> reorder_secret(std::span<const int> s1, std::size_t t);

enum class PredictCase { best, average };

std::string_view to_string(PredictCase c);
PredictCase parse_predict_case(std::string_view name);

std::uint64_t predict_queries(const SchemeParams& params, const PrunedTree& tree, std::size_t t, PredictCase c);

/// Uses attack_tree(params).
std::uint64_t predict_queries(SchemeId scheme, std::size_t t, PredictCase c);

struct AttackReport {
      SchemeId scheme;
      std::size_t t = 0;
      ProbeMode probe_mode = ProbeMode::sign_normalized;
      OracleMode oracle_mode = OracleMode::ideal;
      /// recovered[i][j], centered
      std::vector<std::vector<int>> recovered;
      std::uint64_t queries = 0;
      std::uint64_t block_queries = 0;
      std::uint64_t index_queries = 0;
      std::uint64_t faults = 0;
      std::uint64_t offline_hashes = 0;
      /// unresolved count per polynomial after the block phase
      std::vector<std::size_t> index_sizes;
      /// l * D * ceil(n / t) + sum over classes of ceil(|class| / t)
      std::uint64_t identity_queries = 0;
      std::uint64_t predicted_best = 0;
      std::uint64_t predicted_average = 0;
      /// Set when ground truth was supplied.
      std::optional<bool> success;
};

/// Runs the full attack through the oracle. Passing the victim's secret
/// only fills in the success flag.
AttackReport recover_key(const AttackConfig& config, Oracle& oracle, const SecretKey* truth = nullptr);

}  // namespace kemfault

#endif
