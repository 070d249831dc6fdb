#include <kemfault/serialize.hpp>

#include <kemfault/error.hpp>

#include <json.hpp>

#include <map>
#include <sstream>

namespace kemfault {

namespace {

std::string header_line(SchemeId scheme, std::string_view role) {
   nlohmann::ordered_json h;
   h["format_version"] = serialization_format_version;
   h["role"] = role;
   h["scheme_id"] = to_string(scheme);
   return h.dump() + "\n";
}

std::string coeff_hex(std::span<const std::uint32_t> coeffs) {
   std::vector<std::uint8_t> raw;
   raw.reserve(2 * coeffs.size());
   for(auto c : coeffs) {
      raw.push_back(static_cast<std::uint8_t>(c >> 8));
      raw.push_back(static_cast<std::uint8_t>(c));
   }
   return to_hex(raw);
}

std::vector<std::uint32_t> coeffs_from_hex(std::string_view hex) {
   const auto raw = from_hex(hex);
   if(raw.size() % 2 != 0) {
      throw ParameterError("coefficient array has odd byte length");
   }
   std::vector<std::uint32_t> out(raw.size() / 2);
   for(std::size_t i = 0; i != out.size(); ++i) {
      out[i] = (std::uint32_t(raw[2 * i]) << 8) | raw[2 * i + 1];
   }
   return out;
}

void field(std::string& out, const std::string& name, const std::string& hex) {
   out += name;
   out += ' ';
   out += hex;
   out += '\n';
}

struct Parsed {
      TextHeader header;
      std::map<std::string, std::string> fields;

      const std::string& get(const std::string& name) const {
         auto it = fields.find(name);
         if(it == fields.end()) {
            throw ParameterError("missing field '" + name + "'");
         }
         return it->second;
      }
};

Parsed parse(std::string_view text, std::string_view role) {
   Parsed p{read_header(text), {}};
   if(p.header.role != role) {
      throw ParameterError("expected role '" + std::string(role) + "', found '" + p.header.role + "'");
   }
   std::istringstream in{std::string(text)};
   std::string line;
   std::getline(in, line);
   while(std::getline(in, line)) {
      if(line.empty()) {
         continue;
      }
      const auto sp = line.find(' ');
      if(sp == std::string::npos) {
         throw ParameterError("malformed line '" + line + "'");
      }
      p.fields[line.substr(0, sp)] = line.substr(sp + 1);
   }
   return p;
}

template <typename Array>
void copy_exact(const std::vector<std::uint8_t>& raw, Array& out, std::string_view what) {
   if(raw.size() != out.size()) {
      throw ParameterError(std::string(what) + " must be " + std::to_string(out.size()) + " bytes");
   }
   std::copy(raw.begin(), raw.end(), out.begin());
}

PolyVec read_vec(const Parsed& p, const std::string& prefix, std::size_t l, const Modulus& mod) {
   std::vector<Poly> polys;
   for(std::size_t i = 0; i != l; ++i) {
      polys.emplace_back(mod, coeffs_from_hex(p.get(prefix + std::to_string(i))));
   }
   return PolyVec(std::move(polys));
}

std::string pk_fields(const PublicKey& pk) {
   std::string out;
   field(out, "seed_a", to_hex(pk.seed_a.bytes));
   for(std::size_t i = 0; i != pk.b.size(); ++i) {
      field(out, "b" + std::to_string(i), coeff_hex(pk.b[i].coeffs()));
   }
   return out;
}

PublicKey read_pk(const Parsed& p) {
   const auto& params = scheme_params(p.header.scheme);
   Seed seed_a;
   copy_exact(from_hex(p.get("seed_a")), seed_a.bytes, "seed_a");
   const Modulus bmod(params.family == Family::saber ? params.p : params.q, params.n);
   return PublicKey{params.id, seed_a, expand_matrix(params, seed_a), read_vec(p, "b", params.l, bmod)};
}

}  // namespace

TextHeader read_header(std::string_view text) {
   const auto nl = text.find('\n');
   const std::string first(text.substr(0, nl));
   nlohmann::json h;
   try {
      h = nlohmann::json::parse(first);
      return TextHeader{parse_scheme_id(h.at("scheme_id").get<std::string>()),
                        h.at("role").get<std::string>(),
                        h.at("format_version").get<int>()};
   } catch(const nlohmann::json::exception& e) {
      throw ParameterError(std::string("malformed header: ") + e.what());
   }
}

std::string to_text(const PublicKey& pk) {
   return header_line(pk.scheme, "public_key") + pk_fields(pk);
}

std::string to_text(const KemKeyPair& kp) {
   std::string out = header_line(kp.pk().scheme, "secret_key") + pk_fields(kp.pk());
   for(std::size_t i = 0; i != kp.sk().s.size(); ++i) {
      field(out, "s" + std::to_string(i), coeff_hex(kp.sk().s[i].coeffs()));
   }
   field(out, "hpk", to_hex(kp.hpk));
   field(out, "z", to_hex(kp.z));
   return out;
}

std::string to_text(SchemeId scheme, const Ciphertext& ct) {
   std::string out = header_line(scheme, "ciphertext");
   for(std::size_t i = 0; i != ct.u.size(); ++i) {
      field(out, "u" + std::to_string(i), coeff_hex(ct.u[i]));
   }
   field(out, "v", coeff_hex(ct.v));
   return out;
}

PublicKey public_key_from_text(std::string_view text) {
   return read_pk(parse(text, "public_key"));
}

KemKeyPair keypair_from_text(std::string_view text) {
   const Parsed p = parse(text, "secret_key");
   const auto& params = scheme_params(p.header.scheme);
   KemKeyPair kp{KeyPair{read_pk(p), SecretKey{params.id, read_vec(p, "s", params.l, params.modulus())}}, {}, {}};
   copy_exact(from_hex(p.get("hpk")), kp.hpk, "hpk");
   copy_exact(from_hex(p.get("z")), kp.z, "z");
   return kp;
}

std::pair<SchemeId, Ciphertext> ciphertext_from_text(std::string_view text) {
   const Parsed p = parse(text, "ciphertext");
   const auto& params = scheme_params(p.header.scheme);
   Ciphertext ct;
   for(std::size_t i = 0; i != params.l; ++i) {
      ct.u.push_back(coeffs_from_hex(p.get("u" + std::to_string(i))));
   }
   ct.v = coeffs_from_hex(p.get("v"));
   ct.validate(params);
   return {params.id, std::move(ct)};
}

}  // namespace kemfault
