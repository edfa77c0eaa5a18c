#pragma once

#include <utility>
#include <vector>

namespace fcemu {

// SQUID shunted by a linear inductor:
//   V(phi) = ej * cos((phi - phi_ext) / phi0) + phi^2 / (2 l)
// ej is signed (the SQUID flux can flip the sign of the effective Josephson
// energy); lj = phi0^2 / ej carries the same sign. ej < 0 gives the branch
// where the junction stiffens the minimum and the quartic correction is
// negative.
struct SquidCircuit {
    double ej = 0.0;
    double l = 0.0;
    double phi_ext = 0.0;
    double phi0 = 1.0;
    double lj = 0.0; // derived; infinity when ej == 0
};

SquidCircuit make_squid(double ej, double l, double phi_ext, double phi0);
void validate(const SquidCircuit& circuit);

double potential(const SquidCircuit& circuit, double phi);
// Analytic d^order V / d phi^order for order in 1..4.
double potential_derivative(const SquidCircuit& circuit, double phi, int order);

// Local minimum nearest the stiff-inductor seed phi_ext / (1 + lj / l),
// refined until |V'| drops below 1e-12 of the local force scale. Searches
// within +- pi * phi0 of the seed.
double find_minimum(const SquidCircuit& circuit);

struct TaylorExpansion {
    double phi_min = 0.0;
    double c2 = 0.0; // V''(phi_min) / 2!
    double c3 = 0.0; // V'''(phi_min) / 3!
    double c4 = 0.0; // V''''(phi_min) / 4!
    // Stiff-inductor reference values of c3/c2 and c4/c2 (normalized to the
    // same factorial convention as the exact coefficients above).
    double lo_c3_over_c2 = 0.0;
    double lo_c4_over_c2 = 0.0;
};

TaylorExpansion taylor_coefficients(const SquidCircuit& circuit);

// Inverts the stiff-inductor formulas for (ej, phi_ext), then Newton-refines
// on the exact Taylor ratios until both match the targets to 1e-6 relative.
// The junction sign follows the sign of the quartic target.
SquidCircuit design_anharmonicity(double target_c3_over_c2, double target_c4_over_c2,
                                  double phi0, double l);

std::vector<std::pair<double, double>> potential_curve(const SquidCircuit& circuit,
                                                       const std::vector<double>& phi_grid);

} // namespace fcemu
