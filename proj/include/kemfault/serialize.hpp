/*
 * Text encoding of keys and ciphertexts
 *
 * First line: a JSON object {"format_version", "role", "scheme_id"}.
 * Following lines: "<field> <hex>", where coefficient arrays are written
 * as 4 hex digits (big endian) per coefficient. The matrix A is not
 * stored; it is re-expanded from seed_a on load.
 */

#ifndef KEMFAULT_SERIALIZE_HPP_
#define KEMFAULT_SERIALIZE_HPP_

#include <kemfault/kem.hpp>

#include <string>
#include <string_view>
#include <utility>

namespace kemfault {

inline constexpr int serialization_format_version = 1;

struct TextHeader {
      SchemeId scheme;
      std::string role;
      int format_version;
};

TextHeader read_header(std::string_view text);

std::string to_text(const PublicKey& pk);
std::string to_text(const KemKeyPair& kp);
std::string to_text(SchemeId scheme, const Ciphertext& ct);

PublicKey public_key_from_text(std::string_view text);
KemKeyPair keypair_from_text(std::string_view text);
std::pair<SchemeId, Ciphertext> ciphertext_from_text(std::string_view text);

}  // namespace kemfault

#endif
