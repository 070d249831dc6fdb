/*
 * FO-transformed KEM
 */

#include <kemfault/kem.hpp>

#include <kemfault/error.hpp>

#include <algorithm>

namespace kemfault {

Digest32 HashSuite::H(std::span<const std::uint8_t> in) {
   return sha3_256(in);
}

HashSuite::GOutput HashSuite::G(const Message& m, const Digest32& hpk) {
   std::vector<std::uint8_t> in(m.bytes().begin(), m.bytes().end());
   in.insert(in.end(), hpk.begin(), hpk.end());
   const Digest64 g = sha3_512(in);
   GOutput out;
   std::copy(g.begin(), g.begin() + 32, out.key.begin());
   std::copy(g.begin() + 32, g.end(), out.coins.bytes.begin());
   return out;
}

Digest32 HashSuite::F(const Digest32& key, const Digest32& hct) {
   std::array<std::uint8_t, 64> in;
   std::copy(key.begin(), key.end(), in.begin());
   std::copy(hct.begin(), hct.end(), in.begin() + 32);
   Digest32 out;
   shake256(in, out);
   return out;
}

std::uint8_t FaultController::filter(std::uint8_t fail) {
   if(m_mode == Mode::none || fail == 0) {
      return fail;
   }
   if(m_injector != nullptr) {
      m_injector->induce();
   }
   ++m_faults;
   return 0;
}

KemKeyPair kem_keygen(const SchemeParams& params, const Seed& seed, const KeygenOptions& opts) {
   KemKeyPair kp{pke_keygen(params, seed, opts), {}, {}};
   kp.hpk = HashSuite::H(kp.pke.pk.to_bytes());
   shake256(seed.derive("z").bytes, kp.z);
   return kp;
}

Encapsulation kem_encaps(const SchemeParams& params, const PublicKey& pk, const Seed& seed) {
   std::vector<std::uint8_t> raw((params.n + 7) / 8);
   shake256(seed.derive("m").bytes, raw);
   return kem_encaps_message(params, pk, Message::from_bytes(params.n, raw));
}

Encapsulation kem_encaps_message(const SchemeParams& params, const PublicKey& pk, const Message& m) {
   const Digest32 hpk = HashSuite::H(pk.to_bytes());
   const auto g = HashSuite::G(m, hpk);
   Ciphertext ct = pke_enc(params, pk, m, g.coins);
   const Digest32 hct = HashSuite::H(ct.to_bytes());
   return Encapsulation{std::move(ct), HashSuite::F(g.key, hct)};
}

SharedKey kem_decaps(const SchemeParams& params, const KemKeyPair& kp, const Ciphertext& ct, FaultController& fault) {
   const Message m = pke_dec(params, kp.sk(), ct);
   const auto g = HashSuite::G(m, kp.hpk);
   const Ciphertext re = pke_enc(params, kp.pk(), m, g.coins);

   const auto bytes = ct.to_bytes();
   const auto re_bytes = re.to_bytes();
   const std::uint8_t fail = fault.filter(bytes == re_bytes ? 0 : 1);

   const Digest32 hct = HashSuite::H(bytes);
   return HashSuite::F(fail == 0 ? g.key : kp.z, hct);
}

SharedKey kem_decaps(const SchemeParams& params, const KemKeyPair& kp, const Ciphertext& ct) {
   FaultController honest;
   return kem_decaps(params, kp, ct, honest);
}

}  // namespace kemfault
