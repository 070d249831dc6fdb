/*
 * Decision trees over the secret alphabet
 */

#include <kemfault/tree.hpp>

#include <kemfault/error.hpp>
#include <kemfault/pke.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace kemfault {

namespace {

std::string format_set(std::span<const int> set) {
   std::ostringstream out;
   out << '{';
   for(std::size_t i = 0; i != set.size(); ++i) {
      out << (i ? ", " : "") << set[i];
   }
   out << '}';
   return out.str();
}

unsigned floor_log2(std::size_t x) {
   return static_cast<unsigned>(std::bit_width(x) - 1);
}

}  // namespace

std::uint64_t Distribution::total() const {
   return std::accumulate(weights.begin(), weights.end(), std::uint64_t(0));
}

std::uint64_t Distribution::weight(int value) const {
   for(std::size_t i = 0; i != values.size(); ++i) {
      if(values[i] == value) {
         return weights[i];
      }
   }
   throw ParameterError("value " + std::to_string(value) + " outside the distribution's support");
}

std::uint64_t Distribution::mass(std::span<const int> set) const {
   std::uint64_t m = 0;
   for(int v : set) {
      m += weight(v);
   }
   return m;
}

Distribution cbd_distribution(unsigned eta) {
   if(eta == 0 || eta > 16) {
      throw ParameterError("CBD parameter must lie in [1, 16]");
   }
   Distribution d;
   std::uint64_t c = 1;  // C(2 eta, k)
   for(unsigned k = 0; k <= 2 * eta; ++k) {
      d.values.push_back(int(k) - int(eta));
      d.weights.push_back(c);
      c = c * (2 * eta - k) / (k + 1);
   }
   return d;
}

Rational Rational::make(std::uint64_t num, std::uint64_t den) {
   if(den == 0) {
      throw ParameterError("zero denominator");
   }
   const auto g = std::gcd(num, den);
   return Rational{num / (g ? g : 1), den / (g ? g : 1)};
}

std::uint64_t Rational::ceil_div(std::uint64_t t) const {
   if(t == 0) {
      throw ParameterError("division by zero");
   }
   const std::uint64_t d = den * t;
   return (num + d - 1) / d;
}

std::uint8_t bit_response(const SchemeParams& params, std::uint32_t k_u, std::uint32_t d, int s) {
   if(k_u >= params.u_domain() || d >= params.v_domain()) {
      throw ParameterError("probe constant outside the ciphertext domain");
   }
   if(params.family == Family::saber) {
      const std::int64_t p = params.p;
      const std::int64_t x = std::int64_t(k_u) * s - (std::int64_t(d) << (params.eps_p - params.eps_T)) + params.h2;
      return static_cast<std::uint8_t>((((x % p) + p) % p) >> (params.eps_p - 1));
   }
   const Modulus mod = params.modulus();
   std::int64_t ku = k_u;
   std::int64_t dv = d;
   if(params.family == Family::kyber) {
      ku = decompress(k_u, params.du, mod);
      dv = decompress(d, params.dv, mod);
   }
   return decode_bit(params, mod.reduce(dv - ku * s));
}

std::uint32_t negate_k_u(const SchemeParams& params, std::uint32_t k_u) {
   const std::uint32_t dom = params.u_domain();
   if(k_u >= dom) {
      throw ParameterError("k_u outside the ciphertext domain");
   }
   const std::uint32_t neg = (dom - k_u) % dom;
   if(params.family == Family::kyber) {
      const Modulus mod = params.modulus();
      const std::uint32_t a = decompress(k_u, params.du, mod);
      const std::uint32_t b = decompress(neg, params.du, mod);
      if((a + b) % params.q != 0) {
         throw ParameterError("k_u = " + std::to_string(k_u) + " has no exact negation after decompression");
      }
   }
   return neg;
}

bool is_silent(const SchemeParams& params, std::uint32_t k_u, std::uint32_t filler, std::span<const int> values) {
   for(int s : values) {
      if(bit_response(params, k_u, filler, s) != 0 || bit_response(params, k_u, filler, -s) != 0) {
         return false;
      }
   }
   return true;
}

PrunedTree::PrunedTree(std::vector<DecisionNode> nodes,
                       std::vector<std::uint32_t> level_k_u,
                       std::uint32_t k_u_index,
                       std::uint32_t v_filler) :
      m_nodes(std::move(nodes)), m_level_k_u(std::move(level_k_u)), m_k_u_index(k_u_index), m_v_filler(v_filler) {
   if(m_nodes.empty() || m_nodes.front().set.empty()) {
      throw ParameterError("tree needs a nonempty root");
   }
   const auto& root_set = m_nodes.front().set;
   if(!std::is_sorted(root_set.begin(), root_set.end()) ||
      std::adjacent_find(root_set.begin(), root_set.end()) != root_set.end()) {
      throw ParameterError("root set must be strictly ascending");
   }
   m_depth = root_set.size() > 1 ? floor_log2(root_set.size()) : 0;
   if(m_level_k_u.size() != m_depth) {
      throw ParameterError("tree needs one k_u per block-phase level");
   }
   if(m_nodes.front().depth != 0) {
      throw ParameterError("root must sit at depth 0");
   }

   std::vector<int> parents(m_nodes.size(), 0);
   for(std::size_t id = 0; id != m_nodes.size(); ++id) {
      const auto& n = m_nodes[id];
      if(n.is_leaf()) {
         if(n.set.size() != 1 || n.d || n.pruned || n.children[1] >= 0) {
            throw ParameterError("leaf " + format_set(n.set) + " must be a single unprobed value");
         }
         continue;
      }
      if(!n.d) {
         throw ParameterError("internal node " + format_set(n.set) + " has no probe");
      }
      if(n.depth > m_depth) {
         throw ParameterError("internal node " + format_set(n.set) + " lies below the traversal depth");
      }
      if(n.pruned != (n.depth == m_depth)) {
         throw ParameterError("exactly the internal nodes at the traversal depth are pruned");
      }
      std::vector<int> joined;
      for(int c : n.children) {
         if(c <= 0 || static_cast<std::size_t>(c) >= m_nodes.size()) {
            throw ParameterError("child id out of range");
         }
         const auto& cn = m_nodes[c];
         if(cn.set.empty() || cn.depth != n.depth + 1) {
            throw ParameterError("child of " + format_set(n.set) + " is empty or at the wrong depth");
         }
         parents[c]++;
         joined.insert(joined.end(), cn.set.begin(), cn.set.end());
      }
      std::sort(joined.begin(), joined.end());
      if(joined != n.set) {
         throw ParameterError("children do not partition " + format_set(n.set));
      }
      if(n.pruned) {
         m_pruned.push_back(static_cast<int>(id));
      }
   }
   for(std::size_t id = 1; id != m_nodes.size(); ++id) {
      if(parents[id] != 1) {
         throw ParameterError("node " + format_set(m_nodes[id].set) + " is not reached exactly once");
      }
   }
}

unsigned PrunedTree::height() const {
   unsigned h = 0;
   for(const auto& n : m_nodes) {
      if(!n.is_leaf()) {
         h = std::max(h, n.depth);
      }
   }
   return h;
}

std::uint32_t PrunedTree::k_u_for(int id) const {
   const auto& n = node(id);
   if(n.is_leaf()) {
      throw StateError("leaf nodes carry no probe");
   }
   return n.pruned ? m_k_u_index : m_level_k_u.at(n.depth);
}

int PrunedTree::child(int id, unsigned bit) const {
   const auto& n = node(id);
   if(n.is_leaf()) {
      throw StateError("cannot descend from leaf " + format_set(n.set));
   }
   return n.children[bit & 1];
}

std::vector<int> PrunedTree::pruned_values() const {
   std::vector<int> out;
   for(int id : m_pruned) {
      out.insert(out.end(), node(id).set.begin(), node(id).set.end());
   }
   std::sort(out.begin(), out.end());
   return out;
}

void PrunedTree::check_labels(const SchemeParams& params) const {
   for(std::size_t id = 0; id != m_nodes.size(); ++id) {
      const auto& n = m_nodes[id];
      if(n.is_leaf()) {
         continue;
      }
      const std::uint32_t ku = k_u_for(static_cast<int>(id));
      for(unsigned bit = 0; bit != 2; ++bit) {
         for(int s : node(n.children[bit]).set) {
            if(bit_response(params, ku, *n.d, s) != bit) {
               throw NoProbeError("probe d = " + std::to_string(*n.d) + " at " + format_set(n.set) +
                                  " sends value " + std::to_string(s) + " the wrong way");
            }
         }
      }
   }
   std::vector<std::uint32_t> used = m_level_k_u;
   if(!m_pruned.empty()) {
      used.push_back(m_k_u_index);
   }
   for(auto ku : used) {
      if(!is_silent(params, ku, m_v_filler, support())) {
         throw NoProbeError("filler " + std::to_string(m_v_filler) + " is not silent for k_u = " +
                            std::to_string(ku));
      }
   }
}

std::size_t ProbeTable::mismatches() const {
   std::size_t count = 0;
   for(std::size_t r = 0; r != reference.size(); ++r) {
      for(std::size_t c = 0; c != reference[r].size(); ++c) {
         count += reference[r][c] != bits.at(r).at(c);
      }
   }
   return count;
}

namespace {

ProbeTable table_from_columns(const SchemeParams& params,
                              const PrunedTree& tree,
                              std::vector<ProbeColumn> columns) {
   ProbeTable t;
   t.scheme = params.id;
   t.k_u_block = tree.level_k_u().empty() ? tree.k_u_index() : tree.level_k_u().front();
   t.k_u_index = tree.k_u_index();
   t.v_filler = tree.v_filler();
   t.secrets = tree.support();
   t.columns = std::move(columns);
   for(int s : t.secrets) {
      std::vector<std::uint8_t> row;
      for(const auto& c : t.columns) {
         row.push_back(bit_response(params, c.k_u, c.d, s));
      }
      t.bits.push_back(std::move(row));
   }
   return t;
}

}  // namespace

ProbeTable probe_table(const SchemeParams& params, const PrunedTree& tree) {
   std::vector<ProbeColumn> columns;
   for(std::size_t id = 0; id != tree.nodes().size(); ++id) {
      const auto& n = tree.nodes()[id];
      if(!n.is_leaf()) {
         columns.push_back(ProbeColumn{"d" + std::to_string(id), tree.k_u_for(static_cast<int>(id)), *n.d});
      }
   }
   return table_from_columns(params, tree, std::move(columns));
}

namespace {

struct NodeSpec {
      std::vector<int> set;
      std::optional<std::uint32_t> d;
      int zero = -1;
      int one = -1;
};

std::vector<DecisionNode> wire(const std::vector<NodeSpec>& specs, unsigned traversal_depth) {
   std::vector<DecisionNode> nodes(specs.size());
   for(std::size_t i = 0; i != specs.size(); ++i) {
      nodes[i].set = specs[i].set;
      nodes[i].d = specs[i].d;
      nodes[i].children = {specs[i].zero, specs[i].one};
   }
   for(std::size_t i = 0; i != specs.size(); ++i) {
      for(int c : nodes[i].children) {
         if(c > 0) {
            nodes[c].depth = nodes[i].depth + 1;
         }
      }
   }
   for(auto& n : nodes) {
      n.pruned = !n.is_leaf() && n.depth == traversal_depth;
   }
   return nodes;
}

CanonicalTree kyber768_table() {
   const auto& params = scheme_params(SchemeId::kyber768);
   // ids: 0 root, 1 {-2,-1,0}, 2 {1,2}, 3 {-2,-1} pruned, 4..7 leaves
   const std::vector<NodeSpec> specs = {
      {{-2, -1, 0, 1, 2}, 12, 1, 2},
      {{-2, -1, 0}, 4, 4, 3},
      {{1, 2}, 13, 5, 6},
      {{-2, -1}, 3, 7, 8},
      {{0}, {}, -1, -1},
      {{1}, {}, -1, -1},
      {{2}, {}, -1, -1},
      {{-1}, {}, -1, -1},
      {{-2}, {}, -1, -1},
   };
   PrunedTree tree(wire(specs, 2), {38, 38}, 38, 14);
   tree.check_labels(params);

   std::vector<ProbeColumn> cols = {{"d0", 38, 12}, {"d1", 38, 4}, {"d2", 38, 13}, {"d4", 38, 3}};
   ProbeTable table = table_from_columns(params, tree, std::move(cols));
   table.reference = {
      {0, 1, 0, 1},
      {0, 1, 0, 0},
      {0, 0, 0, 0},
      {1, 0, 0, 0},
      {1, 0, 1, 0},
   };
   return CanonicalTree{std::move(table), std::move(tree)};
}

CanonicalTree saber_table() {
   const auto& params = scheme_params(SchemeId::saber);
   const std::vector<NodeSpec> specs = {
      {{-4, -3, -2, -1, 0, 1, 2, 3, 4}, 4, 1, 2},
      {{-4, -3, -2, -1}, 6, 3, 4},
      {{0, 1, 2, 3, 4}, 2, 5, 6},
      {{-4, -3}, 7, 7, 8},
      {{-2, -1}, 5, 9, 10},
      {{0, 1}, 3, 11, 12},
      {{2, 3, 4}, 1, 13, 14},
      {{-4}, {}, -1, -1},
      {{-3}, {}, -1, -1},
      {{-2}, {}, -1, -1},
      {{-1}, {}, -1, -1},
      {{0}, {}, -1, -1},
      {{1}, {}, -1, -1},
      {{2}, {}, -1, -1},
      {{3, 4}, 12, 15, 16},
      {{3}, {}, -1, -1},
      {{4}, {}, -1, -1},
   };
   PrunedTree tree(wire(specs, 3), {0x3c8, 0x3c8, 0x3c8}, 7, 0);
   tree.check_labels(params);

   std::vector<ProbeColumn> cols = {{"d0", 0x3c8, 4},
                                    {"d2", 0x3c8, 2},
                                    {"d5", 0x3c8, 3},
                                    {"d6", 0x3c8, 1},
                                    {"d1", 0x3c8, 6},
                                    {"d3", 0x3c8, 7},
                                    {"d4", 0x3c8, 5},
                                    {"d7", 7, 12}};
   ProbeTable table = table_from_columns(params, tree, std::move(cols));
   table.reference = {
      {0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 1, 0, 0},
      {0, 0, 0, 0, 1, 1, 0, 0},
      {0, 0, 0, 0, 1, 1, 1, 0},
      {1, 0, 0, 0, 1, 1, 1, 0},
      {1, 0, 1, 0, 1, 1, 1, 0},
      {1, 1, 1, 0, 1, 1, 1, 0},
      {1, 1, 1, 1, 1, 1, 1, 0},
      {1, 1, 1, 1, 1, 1, 1, 1},
   };
   return CanonicalTree{std::move(table), std::move(tree)};
}

/**
 * Level-by-level greedy construction. Node sets are bitmasks over the
 * support. At each level one k_u is chosen for all open nodes; each node
 * takes its best-ranked split under that k_u. Levels backtrack over k_u.
 */
class Builder {
   public:
      Builder(const SchemeParams& params, const Distribution& dist, std::vector<std::uint32_t> kus) :
            m_dist(dist), m_kus(std::move(kus)) {
         const std::size_t m = dist.values.size();
         m_depth = floor_log2(m);
         for(auto ku : m_kus) {
            std::vector<std::uint32_t> masks(params.v_domain(), 0);
            for(std::uint32_t d = 0; d != params.v_domain(); ++d) {
               for(std::size_t i = 0; i != m; ++i) {
                  if(bit_response(params, ku, d, dist.values[i])) {
                     masks[d] |= 1u << i;
                  }
               }
            }
            m_masks.push_back(std::move(masks));
         }
      }

      std::optional<PrunedTree> run(std::uint32_t filler) {
         const std::uint32_t full = (std::uint32_t(1) << m_dist.values.size()) - 1;
         m_nodes.assign(1, Node{full, 0, {}, {-1, -1}});
         m_level_ku.clear();
         m_budget = 20000;
         if(!grow(0, {0})) {
            return std::nullopt;
         }
         std::vector<DecisionNode> nodes;
         for(const auto& n : m_nodes) {
            DecisionNode dn;
            dn.set = values_of(n.mask);
            dn.depth = n.depth;
            dn.children = n.children;
            if(n.children[0] >= 0) {
               dn.d = n.d;
               dn.pruned = n.depth == m_depth;
            }
            nodes.push_back(std::move(dn));
         }
         std::vector<std::uint32_t> levels(m_level_ku.begin(), m_level_ku.begin() + m_depth);
         const std::uint32_t index_ku = m_level_ku.size() > m_depth ? m_level_ku[m_depth] : levels.back();
         return PrunedTree(std::move(nodes), std::move(levels), index_ku, filler);
      }

      const std::vector<int>& stuck() const { return m_stuck; }

   private:
      struct Node {
            std::uint32_t mask;
            unsigned depth;
            std::uint32_t d;
            std::array<int, 2> children;
      };

      struct Split {
            std::uint32_t d;
            std::uint32_t zero;
            std::uint32_t one;
            std::array<std::uint64_t, 3> rank;
      };

      struct Option {
            std::array<std::uint64_t, 3> score;
            std::uint32_t ku;
            std::vector<Split> splits;
      };

      std::vector<int> values_of(std::uint32_t mask) const {
         std::vector<int> out;
         for(std::size_t i = 0; i != m_dist.values.size(); ++i) {
            if(mask >> i & 1) {
               out.push_back(m_dist.values[i]);
            }
         }
         return out;
      }

      std::uint64_t mass(std::uint32_t mask) const {
         std::uint64_t m = 0;
         for(std::size_t i = 0; i != m_dist.values.size(); ++i) {
            if(mask >> i & 1) {
               m += m_dist.weights[i];
            }
         }
         return m;
      }

      std::optional<Split> best_split(std::size_t ku_idx, std::uint32_t set, unsigned depth) const {
         const unsigned cap = depth >= m_depth ? 1 : 1u << (m_depth - depth);
         const std::uint64_t total = mass(set);
         std::optional<Split> best;
         const auto& masks = m_masks[ku_idx];
         for(std::uint32_t d = 0; d != masks.size(); ++d) {
            const std::uint32_t one = masks[d] & set;
            const std::uint32_t zero = set & ~one;
            const auto n1 = unsigned(std::popcount(one));
            const auto n0 = unsigned(std::popcount(zero));
            if(n1 == 0 || n0 == 0 || n1 > cap || n0 > cap) {
               continue;
            }
            const std::uint64_t m0 = mass(zero);
            const std::uint64_t imbalance = n1 > n0 ? n1 - n0 : n0 - n1;
            const std::uint64_t skew = 2 * m0 > total ? 2 * m0 - total : total - 2 * m0;
            const std::uint64_t deep_mass = n1 == n0 ? 0 : mass(n1 > n0 ? one : zero);
            const Split s{d, zero, one, {imbalance, skew, deep_mass}};
            if(!best || s.rank < best->rank) {
               best = s;
            }
         }
         return best;
      }

      bool grow(unsigned depth, const std::vector<int>& frontier) {
         std::vector<int> open;
         for(int id : frontier) {
            if(std::popcount(m_nodes[id].mask) > 1) {
               open.push_back(id);
            }
         }
         if(open.empty()) {
            return true;
         }
         if(depth > m_depth || m_budget == 0) {
            return false;
         }
         --m_budget;

         std::vector<Option> options;
         for(std::size_t k = 0; k != m_kus.size(); ++k) {
            Option opt{{0, 0, 0}, m_kus[k], {}};
            bool ok = true;
            for(int id : open) {
               const auto s = best_split(k, m_nodes[id].mask, depth);
               if(!s) {
                  if(m_stuck.empty() || std::popcount(m_nodes[id].mask) < int(m_stuck.size())) {
                     m_stuck = values_of(m_nodes[id].mask);
                  }
                  ok = false;
                  break;
               }
               for(std::size_t r = 0; r != 3; ++r) {
                  opt.score[r] += s->rank[r];
               }
               opt.splits.push_back(*s);
            }
            if(ok) {
               options.push_back(std::move(opt));
            }
         }
         std::stable_sort(options.begin(), options.end(), [](const Option& a, const Option& b) {
            return a.score < b.score;
         });

         for(const auto& opt : options) {
            const std::size_t saved = m_nodes.size();
            std::vector<int> next;
            for(std::size_t i = 0; i != open.size(); ++i) {
               const int id = open[i];
               const auto& s = opt.splits[i];
               const int zero_id = static_cast<int>(m_nodes.size());
               m_nodes.push_back(Node{s.zero, depth + 1, 0, {-1, -1}});
               m_nodes.push_back(Node{s.one, depth + 1, 0, {-1, -1}});
               m_nodes[id].d = s.d;
               m_nodes[id].children = {zero_id, zero_id + 1};
               next.push_back(zero_id);
               next.push_back(zero_id + 1);
            }
            m_level_ku.push_back(opt.ku);
            if(grow(depth + 1, next)) {
               return true;
            }
            m_level_ku.pop_back();
            m_nodes.resize(saved);
            for(int id : open) {
               m_nodes[id].children = {-1, -1};
            }
            if(m_budget == 0) {
               return false;
            }
         }
         return false;
      }

      const Distribution& m_dist;
      std::vector<std::uint32_t> m_kus;
      std::vector<std::vector<std::uint32_t>> m_masks;
      unsigned m_depth = 0;
      std::vector<Node> m_nodes;
      std::vector<std::uint32_t> m_level_ku;
      std::size_t m_budget = 0;
      std::vector<int> m_stuck;
};

void check_distribution(const Distribution& dist) {
   if(dist.values.size() < 2 || dist.values.size() > 31 || dist.values.size() != dist.weights.size()) {
      throw ParameterError("tree alphabet must have between 2 and 31 values with one weight each");
   }
   if(!std::is_sorted(dist.values.begin(), dist.values.end()) ||
      std::adjacent_find(dist.values.begin(), dist.values.end()) != dist.values.end()) {
      throw ParameterError("tree alphabet must be strictly ascending");
   }
}

bool has_exact_negation(const SchemeParams& params, std::uint32_t ku) {
   try {
      negate_k_u(params, ku);
      return true;
   } catch(const ParameterError&) {
      return false;
   }
}

/// First pair of values that no probe separates under any of the given k_u.
std::optional<std::vector<int>> inseparable_pair(const SchemeParams& params,
                                                 const Distribution& dist,
                                                 const std::vector<std::uint32_t>& kus) {
   const auto& vals = dist.values;
   for(std::size_t i = 0; i != vals.size(); ++i) {
      for(std::size_t j = i + 1; j != vals.size(); ++j) {
         bool separated = false;
         for(auto ku : kus) {
            for(std::uint32_t d = 0; d != params.v_domain() && !separated; ++d) {
               separated = bit_response(params, ku, d, vals[i]) != bit_response(params, ku, d, vals[j]);
            }
            if(separated) {
               break;
            }
         }
         if(!separated) {
            return std::vector<int>{vals[i], vals[j]};
         }
      }
   }
   return std::nullopt;
}

}  // namespace

bool has_canonical_table(SchemeId scheme) {
   return scheme == SchemeId::kyber768 || scheme == SchemeId::saber;
}

CanonicalTree canonical_table(SchemeId scheme) {
   switch(scheme) {
      case SchemeId::kyber768:
         return kyber768_table();
      case SchemeId::saber:
         return saber_table();
      default:
         throw ParameterError("no published probe table for " + std::string(to_string(scheme)) +
                              "; use derive_tree");
   }
}

PrunedTree build_tree(const SchemeParams& params, std::uint32_t k_u, const Distribution& dist) {
   check_distribution(dist);
   std::optional<std::uint32_t> filler;
   for(std::uint32_t f = 0; f != params.v_domain() && !filler; ++f) {
      if(is_silent(params, k_u, f, dist.values)) {
         filler = f;
      }
   }
   if(!filler) {
      throw NoProbeError("no v filler is silent for k_u = " + std::to_string(k_u));
   }
   if(auto pair = inseparable_pair(params, dist, {k_u})) {
      throw NoProbeError("no probe under k_u = " + std::to_string(k_u) + " splits " + format_set(*pair));
   }
   Builder b(params, dist, {k_u});
   if(auto tree = b.run(*filler)) {
      return std::move(*tree);
   }
   throw NoProbeError("no tree of traversal depth " + std::to_string(floor_log2(dist.values.size())) +
                      " under k_u = " + std::to_string(k_u) + "; stuck at " + format_set(b.stuck()));
}

PrunedTree derive_tree(const SchemeParams& params, const Distribution& dist) {
   check_distribution(dist);
   std::vector<std::uint32_t> any_silent;
   std::vector<int> stuck;
   for(std::uint32_t f = 0; f != params.v_domain(); ++f) {
      std::vector<std::uint32_t> kus;
      for(std::uint32_t ku = 1; ku != params.u_domain(); ++ku) {
         if(is_silent(params, ku, f, dist.values) && has_exact_negation(params, ku)) {
            kus.push_back(ku);
         }
      }
      if(kus.empty()) {
         continue;
      }
      if(any_silent.empty()) {
         // Separability does not depend on the filler; check it once.
         std::vector<std::uint32_t> all;
         for(std::uint32_t ku = 1; ku != params.u_domain(); ++ku) {
            for(std::uint32_t g = 0; g != params.v_domain(); ++g) {
               if(is_silent(params, ku, g, dist.values)) {
                  all.push_back(ku);
                  break;
               }
            }
         }
         if(auto pair = inseparable_pair(params, dist, all)) {
            throw NoProbeError(std::string(params.name()) + ": no silent probe splits " + format_set(*pair));
         }
      }
      any_silent.insert(any_silent.end(), kus.begin(), kus.end());
      Builder b(params, dist, kus);
      if(auto tree = b.run(f)) {
         return std::move(*tree);
      }
      if(stuck.empty()) {
         stuck = b.stuck();
      }
   }
   if(any_silent.empty()) {
      throw NoProbeError(std::string(params.name()) + ": no silent (k_u, filler) pair exists");
   }
   throw NoProbeError(std::string(params.name()) + ": no tree of traversal depth " +
                      std::to_string(floor_log2(dist.values.size())) + "; stuck at " + format_set(stuck));
}

PrunedTree attack_tree(const SchemeParams& params) {
   if(has_canonical_table(params.id)) {
      return canonical_table(params.id).tree;
   }
   return derive_tree(params, cbd_distribution(params.secret_eta()));
}

Rational expected_residual(const SchemeParams& params, const PrunedTree& tree, const Distribution& dist) {
   const auto pruned = tree.pruned_values();
   return Rational::make(params.n * dist.mass(pruned), dist.total());
}

}  // namespace kemfault
