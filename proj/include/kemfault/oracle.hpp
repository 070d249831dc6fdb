/*
 * Parallel plaintext-checking oracle
 */

#ifndef KEMFAULT_ORACLE_HPP_
#define KEMFAULT_ORACLE_HPP_

#include <kemfault/kem.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kemfault {

/// Largest candidate width the oracle accepts without an explicit override.
inline constexpr std::size_t default_max_t_ideal = 32;
inline constexpr std::size_t default_max_t_matched = 24;

/**
 * The 2^t messages that vary only on a fixed list of bit positions.
 * Message i has bit k of i at positions[k] and zeros elsewhere.
 * Messages are generated on demand.
 */
class CandidateSet {
   public:
      CandidateSet(std::size_t n, std::vector<std::size_t> positions);

      std::size_t n() const { return m_n; }

      std::size_t t() const { return m_positions.size(); }

      std::uint64_t size() const { return std::uint64_t(1) << t(); }

      const std::vector<std::size_t>& positions() const { return m_positions; }

      Message message(std::uint64_t index) const;

      /// Index of m, or nothing if m has bits outside the positions.
      std::optional<std::uint64_t> index_of(const Message& m) const;

   private:
      std::size_t m_n;
      std::vector<std::size_t> m_positions;
};

/// Throws ParameterError for empty, duplicate or out-of-range positions,
/// or when the width exceeds max_t.
CandidateSet gen_candidates(std::size_t n,
                            std::span<const std::size_t> positions,
                            std::size_t max_t = default_max_t_ideal);

struct QueryRecord {
      Digest32 ct_digest;
      std::uint64_t index;
};

struct QueryLog {
      std::uint64_t queries = 0;
      std::uint64_t faults = 0;
      std::uint64_t offline_hashes = 0;
      std::vector<QueryRecord> records;
};

enum class OracleMode { ideal, matched };

struct OracleLimits {
      std::size_t max_t_ideal = default_max_t_ideal;
      std::size_t max_t_matched = default_max_t_matched;
};

std::string_view to_string(OracleMode mode);
OracleMode parse_oracle_mode(std::string_view name);

/**
 * O(ct; x_0 .. x_{2^t - 1}) -> r.
 *
 * Ideal mode decrypts with the victim's secret directly. Matched mode
 * asks for a faulted decapsulation and finds the candidate whose
 * F(G(x_r, H(pk)).key, H(ct)) equals the leaked key, searching in
 * ascending index order. The attacker-side work uses only the public key.
 * One query at a time.
 */
class Oracle {
   public:
      /// The victim must outlive the oracle. In matched mode without a
      /// controller, a private force-pass controller is used.
      Oracle(const SchemeParams& params,
             const KemKeyPair& victim,
             OracleMode mode,
             FaultController* fault = nullptr,
             OracleLimits limits = {});

      Oracle(const Oracle&) = delete;
      Oracle& operator=(const Oracle&) = delete;

      std::uint64_t query(const Ciphertext& ct, const CandidateSet& cands);

      OracleMode mode() const { return m_mode; }

      const QueryLog& log() const { return m_log; }

      std::size_t max_t() const;

      const SchemeParams& params() const { return m_params; }

      const PublicKey& public_key() const { return m_victim.pk(); }

   private:
      std::uint64_t query_ideal(const Ciphertext& ct, const CandidateSet& cands);
      std::uint64_t query_matched(const Ciphertext& ct, const CandidateSet& cands, const Digest32& hct);

      SchemeParams m_params;
      const KemKeyPair& m_victim;
      OracleMode m_mode;
      FaultController m_own_fault;
      FaultController* m_fault;
      OracleLimits m_limits;
      Digest32 m_hpk;
      QueryLog m_log;

      // G(x_r, H(pk)).key for the candidate set last seen, filled lazily
      std::vector<std::size_t> m_cached_positions;
      std::vector<Digest32> m_cached_keys;
};

}  // namespace kemfault

#endif
