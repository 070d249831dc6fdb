#include <kemfault/oracle.hpp>

#include <kemfault/error.hpp>

#include <string>

namespace kemfault {

namespace {

constexpr std::size_t max_candidate_bits = 63;

}  // namespace

CandidateSet::CandidateSet(std::size_t n, std::vector<std::size_t> positions) :
      m_n(n), m_positions(std::move(positions)) {
   if(m_positions.empty()) {
      throw ParameterError("candidate set needs at least one position");
   }
   if(m_positions.size() > max_candidate_bits) {
      throw ParameterError("candidate set wider than 63 bits");
   }
   std::vector<bool> seen(n, false);
   for(auto p : m_positions) {
      if(p >= n) {
         throw ParameterError("candidate position " + std::to_string(p) + " outside message of " + std::to_string(n) +
                              " bits");
      }
      if(seen[p]) {
         throw ParameterError("duplicate candidate position " + std::to_string(p));
      }
      seen[p] = true;
   }
}

Message CandidateSet::message(std::uint64_t index) const {
   if(index >= size()) {
      throw ParameterError("candidate index out of range");
   }
   Message m(m_n);
   for(std::size_t k = 0; k != m_positions.size(); ++k) {
      if((index >> k) & 1) {
         m.set_bit(m_positions[k], true);
      }
   }
   return m;
}

std::optional<std::uint64_t> CandidateSet::index_of(const Message& m) const {
   if(m.bits() != m_n) {
      return std::nullopt;
   }
   Message rest = m;
   std::uint64_t index = 0;
   for(std::size_t k = 0; k != m_positions.size(); ++k) {
      if(m.bit(m_positions[k])) {
         index |= std::uint64_t(1) << k;
         rest.set_bit(m_positions[k], false);
      }
   }
   if(!rest.is_zero()) {
      return std::nullopt;
   }
   return index;
}

CandidateSet gen_candidates(std::size_t n, std::span<const std::size_t> positions, std::size_t max_t) {
   if(positions.size() > max_t) {
      throw ParameterError("parallelization factor " + std::to_string(positions.size()) + " exceeds ceiling " +
                           std::to_string(max_t));
   }
   return CandidateSet(n, std::vector<std::size_t>(positions.begin(), positions.end()));
}

std::string_view to_string(OracleMode mode) {
   return mode == OracleMode::ideal ? "ideal" : "matched";
}

OracleMode parse_oracle_mode(std::string_view name) {
   if(name == "ideal") {
      return OracleMode::ideal;
   }
   if(name == "matched") {
      return OracleMode::matched;
   }
   throw ParameterError("unknown oracle mode '" + std::string(name) + "'");
}

Oracle::Oracle(const SchemeParams& params,
               const KemKeyPair& victim,
               OracleMode mode,
               FaultController* fault,
               OracleLimits limits) :
      m_params(params),
      m_victim(victim),
      m_mode(mode),
      m_own_fault(FaultController::Mode::force_pass),
      m_fault(fault != nullptr ? fault : &m_own_fault),
      m_limits(limits),
      m_hpk(HashSuite::H(victim.pk().to_bytes())) {
   if(params.id != victim.pk().scheme) {
      throw ParameterError("oracle parameters do not match the victim key");
   }
   if(mode == OracleMode::matched && m_fault->mode() != FaultController::Mode::force_pass) {
      throw ParameterError("matched oracle needs a force-pass fault controller");
   }
}

std::size_t Oracle::max_t() const {
   return m_mode == OracleMode::ideal ? m_limits.max_t_ideal : m_limits.max_t_matched;
}

std::uint64_t Oracle::query(const Ciphertext& ct, const CandidateSet& cands) {
   if(cands.t() > max_t()) {
      throw ParameterError("candidate width " + std::to_string(cands.t()) + " exceeds the " +
                           std::string(to_string(m_mode)) + " oracle ceiling " + std::to_string(max_t()));
   }
   if(cands.n() != m_params.n) {
      throw ParameterError("candidate messages have the wrong length");
   }
   ct.validate(m_params);
   const Digest32 hct = HashSuite::H(ct.to_bytes());

   const std::uint64_t r = m_mode == OracleMode::ideal ? query_ideal(ct, cands) : query_matched(ct, cands, hct);
   m_log.queries++;
   m_log.records.push_back(QueryRecord{hct, r});
   return r;
}

std::uint64_t Oracle::query_ideal(const Ciphertext& ct, const CandidateSet& cands) {
   const auto r = cands.index_of(pke_dec(m_params, m_victim.sk(), ct));
   if(!r) {
      throw OracleMiss("decrypted message lies outside the candidate set");
   }
   return *r;
}

std::uint64_t Oracle::query_matched(const Ciphertext& ct, const CandidateSet& cands, const Digest32& hct) {
   const std::uint64_t before = m_fault->faults();
   const SharedKey leaked = kem_decaps(m_params, m_victim, ct, *m_fault);
   m_log.faults += m_fault->faults() - before;

   if(m_cached_positions != cands.positions()) {
      m_cached_positions = cands.positions();
      m_cached_keys.clear();
   }
   for(std::uint64_t r = 0; r != cands.size(); ++r) {
      if(r == m_cached_keys.size()) {
         m_cached_keys.push_back(HashSuite::G(cands.message(r), m_hpk).key);
      }
      m_log.offline_hashes++;
      if(HashSuite::F(m_cached_keys[r], hct) == leaked) {
         return r;
      }
   }
   throw OracleMiss("no candidate reproduces the leaked shared key");
}

}  // namespace kemfault
