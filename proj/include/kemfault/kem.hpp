/*
 * FO-transformed KEM with a fault-controllable decapsulation
 */

#ifndef KEMFAULT_KEM_HPP_
#define KEMFAULT_KEM_HPP_

#include <kemfault/pke.hpp>

#include <cstdint>

namespace kemfault {

/**
 * Hash functions of the FO transform.
 *
 * H = SHA3-256; G = SHA3-512(m || H(pk)) split into a 32 byte pre-key
 * and 32 bytes of encryption coins; F = SHAKE256(K' || H(ct)) truncated
 * to 32 bytes.
 */
struct HashSuite {
      struct GOutput {
            Digest32 key;
            Seed coins;
      };

      static Digest32 H(std::span<const std::uint8_t> in);
      static GOutput G(const Message& m, const Digest32& hpk);
      static Digest32 F(const Digest32& key, const Digest32& hct);
};

using SharedKey = Digest32;

/// The decapsulation secret (sk || pk || H(pk) || z).
struct KemKeyPair {
      KeyPair pke;
      Digest32 hpk;
      Digest32 z;

      const PublicKey& pk() const { return pke.pk; }

      const SecretKey& sk() const { return pke.sk; }
};

struct Encapsulation {
      Ciphertext ct;
      SharedKey key;
};

/// Something able to flip the comparison flag of one decapsulation.
class FaultInjector {
   public:
      virtual ~FaultInjector() = default;

      /// Returns once the flag has been flipped.
      virtual void induce() = 0;
};

/**
 * Gate on the "fail" flag of the ciphertext comparison.
 *
 * In force_pass mode every mismatch is turned into a match and counted
 * as one consumed fault. An attached injector is driven once per fault.
 * Not thread safe.
 */
class FaultController {
   public:
      enum class Mode { none, force_pass };

      explicit FaultController(Mode mode = Mode::none, FaultInjector* injector = nullptr) :
            m_mode(mode), m_injector(injector) {}

      Mode mode() const { return m_mode; }

      void set_mode(Mode mode) { m_mode = mode; }

      std::uint64_t faults() const { return m_faults; }

      /// Value of the flag as seen by the key selection.
      std::uint8_t filter(std::uint8_t fail);

   private:
      Mode m_mode;
      FaultInjector* m_injector;
      std::uint64_t m_faults = 0;
};

KemKeyPair kem_keygen(const SchemeParams& params, const Seed& seed, const KeygenOptions& opts = {});

/// Draws m from the seed.
Encapsulation kem_encaps(const SchemeParams& params, const PublicKey& pk, const Seed& seed);

Encapsulation kem_encaps_message(const SchemeParams& params, const PublicKey& pk, const Message& m);

SharedKey kem_decaps(const SchemeParams& params, const KemKeyPair& kp, const Ciphertext& ct, FaultController& fault);

/// Decapsulation without any fault path.
SharedKey kem_decaps(const SchemeParams& params, const KemKeyPair& kp, const Ciphertext& ct);

}  // namespace kemfault

#endif
