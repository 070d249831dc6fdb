/*
 * Probe constants and pruned binary decision trees over the secret alphabet
 */

#ifndef KEMFAULT_TREE_HPP_
#define KEMFAULT_TREE_HPP_

#include <kemfault/params.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kemfault {

/// Integer weights over an ordered list of secret values.
struct Distribution {
      std::vector<int> values;
      std::vector<std::uint64_t> weights;

      std::uint64_t total() const;
      std::uint64_t mass(std::span<const int> set) const;
      std::uint64_t weight(int value) const;
};

/// Centered binomial: value s has weight C(2 eta, eta + s) out of 4^eta.
Distribution cbd_distribution(unsigned eta);

/// Non-negative fraction kept in lowest terms.
struct Rational {
      std::uint64_t num = 0;
      std::uint64_t den = 1;

      static Rational make(std::uint64_t num, std::uint64_t den);

      double value() const { return double(num) / double(den); }

      /// ceil(this / t)
      std::uint64_t ceil_div(std::uint64_t t) const;

      bool operator==(const Rational&) const = default;
};

/// Decoded message bit for a probed coefficient holding secret value s.
std::uint8_t bit_response(const SchemeParams& params, std::uint32_t k_u, std::uint32_t d, int s);

/// u-domain value acting as the exact negation of k_u. Throws ParameterError
/// when compression makes the negation inexact.
std::uint32_t negate_k_u(const SchemeParams& params, std::uint32_t k_u);

/// True when v = filler decodes to 0 for every value and both probe signs.
bool is_silent(const SchemeParams& params, std::uint32_t k_u, std::uint32_t filler, std::span<const int> values);

struct DecisionNode {
      std::vector<int> set;
      std::optional<std::uint32_t> d;
      /// bit-0 child, bit-1 child
      std::array<int, 2> children{-1, -1};
      unsigned depth = 0;
      bool pruned = false;

      bool is_leaf() const { return children[0] < 0; }
};

/**
 * Decision tree whose internal nodes at depth D = floor(log2 |S_0|) are
 * pruned: the block phase stops there and the index phase resolves them.
 * Every node at depth k < D is probed with level_k_u[k]; pruned nodes
 * use k_u_index. Node 0 is the root.
 */
class PrunedTree {
   public:
      PrunedTree(std::vector<DecisionNode> nodes,
                 std::vector<std::uint32_t> level_k_u,
                 std::uint32_t k_u_index,
                 std::uint32_t v_filler);

      const std::vector<DecisionNode>& nodes() const { return m_nodes; }

      const DecisionNode& node(int id) const { return m_nodes.at(static_cast<std::size_t>(id)); }

      const DecisionNode& root() const { return m_nodes.front(); }

      const std::vector<int>& support() const { return root().set; }

      /// floor(log2 |S_0|), the number of block-phase probes per coefficient.
      unsigned traversal_depth() const { return m_depth; }

      /// Largest depth of a probed node.
      unsigned height() const;

      const std::vector<std::uint32_t>& level_k_u() const { return m_level_k_u; }

      std::uint32_t k_u_index() const { return m_k_u_index; }

      std::uint32_t v_filler() const { return m_v_filler; }

      std::uint32_t k_u_for(int id) const;

      /// Child reached on the given response bit; StateError on leaves.
      int child(int id, unsigned bit) const;

      const std::vector<int>& pruned_ids() const { return m_pruned; }

      /// Union of the pruned sets, ascending.
      std::vector<int> pruned_values() const;

      /// Throws NoProbeError if some edge disagrees with bit_response, or the
      /// filler is not silent for a used k_u.
      void check_labels(const SchemeParams& params) const;

   private:
      std::vector<DecisionNode> m_nodes;
      std::vector<std::uint32_t> m_level_k_u;
      std::uint32_t m_k_u_index;
      std::uint32_t m_v_filler;
      unsigned m_depth;
      std::vector<int> m_pruned;
};

struct ProbeColumn {
      std::string label;
      std::uint32_t k_u;
      std::uint32_t d;
};

/// Response bits of every probe of a tree for every secret value.
struct ProbeTable {
      SchemeId scheme;
      std::uint32_t k_u_block;
      std::uint32_t k_u_index;
      std::uint32_t v_filler;
      std::vector<int> secrets;
      std::vector<ProbeColumn> columns;
      /// bits[row][column] = bit_response(k_u, d, secrets[row])
      std::vector<std::vector<std::uint8_t>> bits;
      /// Published bits in the same layout; empty for derived tables.
      std::vector<std::vector<std::uint8_t>> reference;

      /// Cells differing from the reference.
      std::size_t mismatches() const;
};

/// Columns follow node order.
ProbeTable probe_table(const SchemeParams& params, const PrunedTree& tree);

struct CanonicalTree {
      ProbeTable table;
      PrunedTree tree;
};

/// Published trees for kyber768 and saber; ParameterError for other schemes.
CanonicalTree canonical_table(SchemeId scheme);

bool has_canonical_table(SchemeId scheme);

/// Greedy tree with one k_u at every level and the smallest silent filler.
PrunedTree build_tree(const SchemeParams& params, std::uint32_t k_u, const Distribution& dist);

/// Greedy tree with k_u searched per level.
PrunedTree derive_tree(const SchemeParams& params, const Distribution& dist);

/// Canonical tree when published, otherwise derive_tree over the secret's CBD.
PrunedTree attack_tree(const SchemeParams& params);

/// E1 = n * P(value lies in a pruned set).
Rational expected_residual(const SchemeParams& params, const PrunedTree& tree, const Distribution& dist);

}  // namespace kemfault

#endif
