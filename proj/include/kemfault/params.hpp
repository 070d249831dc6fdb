/*
 * Parameter sets for the LPR-style schemes under attack
 */

#ifndef KEMFAULT_PARAMS_HPP_
#define KEMFAULT_PARAMS_HPP_

#include <kemfault/ring.hpp>

#include <cstdint>
#include <span>
#include <string_view>

namespace kemfault {

enum class SchemeId { lpr_generic, kyber512, kyber768, kyber1024, lightsaber, saber, firesaber };

enum class Family { lpr, kyber, saber };

/**
 * All constants of one scheme instance.
 *
 * Kyber stores p = 2^du and T = 2^dv; Saber stores the exponents
 * eps_q, eps_p, eps_T together with its rounding constants h1, h2.
 * For Saber, eta1 = eta2 = mu, the half-width of the binomial.
 * The generic LPR instance transmits u and v uncompressed (du = dv = 0).
 */
struct SchemeParams {
      SchemeId id;
      Family family;
      std::size_t n;
      std::size_t l;
      std::uint32_t q;
      std::uint32_t p;
      std::uint32_t T;
      unsigned eta1;
      unsigned eta2;
      unsigned mu;
      unsigned du;
      unsigned dv;
      unsigned eps_q;
      unsigned eps_p;
      unsigned eps_T;
      std::uint32_t h1;
      std::uint32_t h2;

      Modulus modulus() const { return Modulus(q, n); }

      /// Number of distinct values a transmitted u coefficient may take.
      std::uint32_t u_domain() const;

      /// Number of distinct values a transmitted v coefficient may take.
      std::uint32_t v_domain() const;

      /// Half-width of the secret's binomial distribution.
      unsigned secret_eta() const { return eta1; }

      std::string_view name() const;
};

const SchemeParams& scheme_params(SchemeId id);

std::string_view to_string(SchemeId id);

/// Throws ParameterError for unknown names.
SchemeId parse_scheme_id(std::string_view name);

std::span<const SchemeId> all_scheme_ids();

}  // namespace kemfault

#endif
