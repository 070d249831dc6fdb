#include <kemfault/params.hpp>

#include <kemfault/error.hpp>

#include <array>
#include <string>

namespace kemfault {

namespace {

constexpr SchemeParams kyber(SchemeId id, std::size_t l, unsigned eta1, unsigned du, unsigned dv) {
   return SchemeParams{id, Family::kyber, 256, l, 3329, 1u << du, 1u << dv, eta1, 2, 0, du, dv, 0, 0, 0, 0, 0};
}

constexpr SchemeParams saber(SchemeId id, std::size_t l, unsigned mu, unsigned eps_t) {
   constexpr unsigned eq = 13;
   constexpr unsigned ep = 10;
   const std::uint32_t h1 = 1u << (eq - ep - 1);
   const std::uint32_t h2 = (1u << (ep - 2)) - (1u << (ep - eps_t - 1)) + (1u << (eq - ep - 1));
   return SchemeParams{id, Family::saber, 256, l, 1u << eq, 1u << ep, 1u << eps_t, mu, mu, mu, 0, 0, eq, ep, eps_t, h1,
                       h2};
}

const std::array<SchemeParams, 7> all_params = {
   SchemeParams{SchemeId::lpr_generic, Family::lpr, 256, 1, 3329, 3329, 3329, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0},
   kyber(SchemeId::kyber512, 2, 3, 10, 4),
   kyber(SchemeId::kyber768, 3, 2, 10, 4),
   kyber(SchemeId::kyber1024, 4, 2, 11, 5),
   saber(SchemeId::lightsaber, 2, 5, 3),
   saber(SchemeId::saber, 3, 4, 4),
   saber(SchemeId::firesaber, 4, 3, 6),
};

const std::array<SchemeId, 7> ids = {SchemeId::lpr_generic,
                                     SchemeId::kyber512,
                                     SchemeId::kyber768,
                                     SchemeId::kyber1024,
                                     SchemeId::lightsaber,
                                     SchemeId::saber,
                                     SchemeId::firesaber};

const std::array<std::string_view, 7> names = {
   "lpr-generic", "kyber512", "kyber768", "kyber1024", "lightsaber", "saber", "firesaber"};

}  // namespace

std::uint32_t SchemeParams::u_domain() const {
   return family == Family::lpr ? q : p;
}

std::uint32_t SchemeParams::v_domain() const {
   return family == Family::lpr ? q : T;
}

std::string_view SchemeParams::name() const {
   return to_string(id);
}

const SchemeParams& scheme_params(SchemeId id) {
   return all_params.at(static_cast<std::size_t>(id));
}

std::string_view to_string(SchemeId id) {
   return names.at(static_cast<std::size_t>(id));
}

SchemeId parse_scheme_id(std::string_view name) {
   for(std::size_t i = 0; i != names.size(); ++i) {
      if(names[i] == name) {
         return ids[i];
      }
   }
   throw ParameterError("unknown scheme '" + std::string(name) + "'");
}

std::span<const SchemeId> all_scheme_ids() {
   return ids;
}

}  // namespace kemfault
