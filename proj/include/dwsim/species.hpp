#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "dwsim/constants.hpp"

namespace dwsim {

enum class SpeciesLabel { proton, antiproton, beryllium9_ion };

struct ParticleSpecies {
    SpeciesLabel label;
    double mass;    // kg
    double charge;  // C, signed
};

// Relative atomic masses (u). The Be+ mass subtracts one electron from the
// neutral atom by default; the correction is ~6e-5 relative and toggleable.
inline constexpr double proton_mass_u = 1.007276466621;
inline constexpr double beryllium9_atom_mass_u = 9.012183065;

inline ParticleSpecies species(SpeciesLabel label, bool electron_mass_correction = true) {
    using namespace constants;
    switch (label) {
        case SpeciesLabel::proton:
            return {label, proton_mass_u * atomic_mass_unit, +elementary_charge};
        case SpeciesLabel::antiproton:
            return {label, proton_mass_u * atomic_mass_unit, -elementary_charge};
        case SpeciesLabel::beryllium9_ion: {
            double m = beryllium9_atom_mass_u * atomic_mass_unit;
            if (electron_mass_correction) m -= electron_mass;
            return {label, m, +elementary_charge};
        }
    }
    throw std::invalid_argument("species: unknown label");
}

inline ParticleSpecies species(std::string_view name, bool electron_mass_correction = true) {
    if (name == "proton" || name == "p") return species(SpeciesLabel::proton, electron_mass_correction);
    if (name == "antiproton" || name == "pbar")
        return species(SpeciesLabel::antiproton, electron_mass_correction);
    if (name == "beryllium9_ion" || name == "Be" || name == "Be+" || name == "be9")
        return species(SpeciesLabel::beryllium9_ion, electron_mass_correction);
    throw std::invalid_argument("species: unknown label '" + std::string(name) + "'");
}

inline std::string species_name(SpeciesLabel label) {
    switch (label) {
        case SpeciesLabel::proton: return "proton";
        case SpeciesLabel::antiproton: return "antiproton";
        case SpeciesLabel::beryllium9_ion: return "beryllium9_ion";
    }
    return "?";
}

}  // namespace dwsim
