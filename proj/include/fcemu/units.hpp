#pragma once

#include <cmath>
#include <numbers>

// Unit conversion boundary. The math core works in internal units with
// hbar = k_B = 1, energy in eV, mass in amu; the internal length unit is
// then fixed to hbar / sqrt(amu * eV). Frequencies are angular and carry
// energy dimension, so "omega" and "hbar*omega in eV" are the same number.
//
// Circuit-side calibration: an internal mass unit (1 amu) corresponds to a
// reference capacitance c0 (default 0.5 pF per amu). All derived electrical
// units follow from that choice plus the primary constants below.

namespace fcemu::units {

// Primary constants (SI, CODATA; exact where the 2019 SI fixes them).
inline constexpr double elementary_charge_coulomb = 1.602176634e-19; // exact
inline constexpr double planck_joule_second = 6.62607015e-34;        // exact
inline constexpr double boltzmann_joule_per_kelvin = 1.380649e-23;   // exact
inline constexpr double amu_kilogram = 1.660539067e-27;              // 10 significant digits

inline constexpr double hbar_joule_second = planck_joule_second / (2.0 * std::numbers::pi);
inline constexpr double ev_joule = elementary_charge_coulomb;

// hf for f = 1 GHz, expressed in eV: 4.135667696e-6.
inline constexpr double ev_per_ghz = planck_joule_second * 1e9 / ev_joule;

// k_B * 1 mK in eV: 8.617333262e-8.
inline constexpr double ev_per_mk = boltzmann_joule_per_kelvin * 1e-3 / ev_joule;

// Internal length unit in Angstrom: hbar / sqrt(amu * eV) ~ 0.06465 A.
inline const double length_unit_angstrom =
    hbar_joule_second / std::sqrt(amu_kilogram * ev_joule) * 1e10;

// --- molecular file units <-> internal -------------------------------------

inline double hessian_to_internal(double a_ev_per_a2) {
    return a_ev_per_a2 * length_unit_angstrom * length_unit_angstrom;
}
inline double hessian_to_file(double a_internal) {
    return a_internal / (length_unit_angstrom * length_unit_angstrom);
}
inline double displacement_to_internal(double v_angstrom) {
    return v_angstrom / length_unit_angstrom;
}
inline double displacement_to_file(double v_internal) {
    return v_internal * length_unit_angstrom;
}

inline double ghz_to_internal(double f_ghz) { return f_ghz * ev_per_ghz; }
inline double internal_to_ghz(double omega) { return omega / ev_per_ghz; }
inline double mev_to_internal(double e_mev) { return e_mev * 1e-3; }
inline double internal_to_mev(double e) { return e * 1e3; }
inline double mk_to_internal(double t_mk) { return t_mk * ev_per_mk; }

// --- circuit calibration ----------------------------------------------------

// Maps internal capacitance / coupling / driving values to laboratory units.
// c0_pf is the capacitance assigned to m0_amu internal mass units.
struct CircuitCalibration {
    double c0_pf = 0.5;
    double m0_amu = 1.0;

    double capacitance_farad_per_unit() const { return c0_pf / m0_amu * 1e-12; }

    double capacitance_to_pf(double c_internal) const {
        return c_internal * (c0_pf / m0_amu);
    }
    // B carries (energy / flux^2) = capacitance / time^2; 1/H = F/s^2.
    double coupling_to_inv_nh(double b_internal) const {
        const double per_second = ev_joule / hbar_joule_second;
        return b_internal * capacitance_farad_per_unit() * per_second * per_second * 1e-9;
    }
    // Driving has current dimension: sqrt(E^3 C) / hbar.
    double driving_to_na(double v_internal) const {
        const double ampere_per_unit =
            std::sqrt(ev_joule * ev_joule * ev_joule * capacitance_farad_per_unit()) /
            hbar_joule_second;
        return v_internal * ampere_per_unit * 1e9;
    }
};

} // namespace fcemu::units
