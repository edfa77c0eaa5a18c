#include "fcemu/anharmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "fcemu/errors.hpp"

namespace fcemu {

SquidCircuit make_squid(double ej, double l, double phi_ext, double phi0) {
    SquidCircuit circuit;
    circuit.ej = ej;
    circuit.l = l;
    circuit.phi_ext = phi_ext;
    circuit.phi0 = phi0;
    circuit.lj = ej != 0.0 ? phi0 * phi0 / ej : std::numeric_limits<double>::infinity();
    validate(circuit);
    return circuit;
}

void validate(const SquidCircuit& circuit) {
    if (!(circuit.l > 0.0)) throw validation_error("squid circuit: inductance must be positive");
    if (!(circuit.phi0 > 0.0)) throw validation_error("squid circuit: phi0 must be positive");
    if (circuit.ej != 0.0) {
        const double expected = circuit.phi0 * circuit.phi0 / circuit.ej;
        if (std::abs(circuit.lj - expected) > 1e-12 * std::abs(expected)) {
            throw validation_error("squid circuit: lj inconsistent with ej");
        }
    }
}

double potential(const SquidCircuit& circuit, double phi) {
    const double theta = (phi - circuit.phi_ext) / circuit.phi0;
    return circuit.ej * std::cos(theta) + phi * phi / (2.0 * circuit.l);
}

double potential_derivative(const SquidCircuit& circuit, double phi, int order) {
    const double theta = (phi - circuit.phi_ext) / circuit.phi0;
    const double p = circuit.phi0;
    switch (order) {
        case 1: return -circuit.ej / p * std::sin(theta) + phi / circuit.l;
        case 2: return -circuit.ej / (p * p) * std::cos(theta) + 1.0 / circuit.l;
        case 3: return circuit.ej / (p * p * p) * std::sin(theta);
        case 4: return circuit.ej / (p * p * p * p) * std::cos(theta);
        default: throw validation_error("potential_derivative: order must be 1..4");
    }
}

namespace {

// L / L_J with sign; zero for a bare inductor.
double stiffness_ratio(const SquidCircuit& circuit) {
    return circuit.l * circuit.ej / (circuit.phi0 * circuit.phi0);
}

double seed_minimum(const SquidCircuit& circuit) {
    const double x = stiffness_ratio(circuit);
    if (std::abs(1.0 - x) < 1e-9) return 0.0;
    return -x * circuit.phi_ext / (1.0 - x);
}

} // namespace

double find_minimum(const SquidCircuit& circuit) {
    validate(circuit);
    if (circuit.ej == 0.0) return 0.0;

    const double seed = seed_minimum(circuit);
    const double window = std::numbers::pi * circuit.phi0;
    const double grad_tol =
        1e-12 * (std::abs(potential_derivative(circuit, seed, 2)) + 1.0 / circuit.l) *
        circuit.phi0;

    // Scan for gradient sign changes around the seed, nearest first.
    const int half_steps = 64;
    const double h = window / half_steps;
    double best_lo = 0.0, best_hi = 0.0;
    bool found = false;
    double prev_phi = seed - window;
    double prev_grad = potential_derivative(circuit, prev_phi, 1);
    for (int i = 1; i <= 2 * half_steps; ++i) {
        const double phi = seed - window + i * h;
        const double grad = potential_derivative(circuit, phi, 1);
        if (prev_grad < 0.0 && grad >= 0.0) {
            if (!found || std::abs(0.5 * (prev_phi + phi) - seed) <
                              std::abs(0.5 * (best_lo + best_hi) - seed)) {
                best_lo = prev_phi;
                best_hi = phi;
                found = true;
            }
        }
        prev_phi = phi;
        prev_grad = grad;
    }
    if (!found) {
        throw validation_error("find_minimum: no stable minimum within the search window");
    }

    double lo = best_lo, hi = best_hi;
    for (int iter = 0; iter < 200 && hi - lo > 1e-16 * circuit.phi0; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (potential_derivative(circuit, mid, 1) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double phi = 0.5 * (lo + hi);
    for (int iter = 0; iter < 50; ++iter) {
        const double grad = potential_derivative(circuit, phi, 1);
        if (std::abs(grad) <= grad_tol) break;
        const double curv = potential_derivative(circuit, phi, 2);
        if (curv <= 0.0) break;
        phi -= grad / curv;
    }
    if (potential_derivative(circuit, phi, 2) <= 0.0) {
        throw validation_error("find_minimum: converged to a non-minimum stationary point");
    }
    return phi;
}

TaylorExpansion taylor_coefficients(const SquidCircuit& circuit) {
    TaylorExpansion expansion;
    expansion.phi_min = find_minimum(circuit);
    const double d2 = potential_derivative(circuit, expansion.phi_min, 2);
    if (d2 <= 0.0) {
        throw validation_error("taylor_coefficients: expansion point is not a proper minimum");
    }
    expansion.c2 = d2 / 2.0;
    expansion.c3 = potential_derivative(circuit, expansion.phi_min, 3) / 6.0;
    expansion.c4 = potential_derivative(circuit, expansion.phi_min, 4) / 24.0;

    const double x = stiffness_ratio(circuit);
    const double p2 = circuit.phi0 * circuit.phi0;
    if (std::abs(1.0 - x) > 1e-12) {
        expansion.lo_c3_over_c2 = -x * circuit.phi_ext / (3.0 * (1.0 - x) * p2);
    }
    expansion.lo_c4_over_c2 = x / (12.0 * p2);
    return expansion;
}

SquidCircuit design_anharmonicity(double target_c3_over_c2, double target_c4_over_c2,
                                  double phi0, double l) {
    if (!(phi0 > 0.0) || !(l > 0.0)) {
        throw validation_error("design_anharmonicity: phi0 and l must be positive");
    }
    const double p2 = phi0 * phi0;
    if (target_c4_over_c2 == 0.0) {
        if (target_c3_over_c2 != 0.0) {
            throw validation_error(
                "design_anharmonicity: a cubic target needs a nonzero quartic target inside "
                "the stiff-inductor window");
        }
        return make_squid(0.0, l, 0.0, phi0);
    }

    // Stiff-inductor inversion: c4/c2 = x / (12 (1-x) phi0^2) with x = L/L_J.
    const double y = 12.0 * p2 * target_c4_over_c2;
    if (1.0 + y <= 0.0) {
        throw validation_error("design_anharmonicity: quartic target below the reachable range");
    }
    const double x = y / (1.0 + y);
    if (std::abs(x) > 0.9) {
        std::ostringstream msg;
        msg << "design_anharmonicity: targets need |L/L_J| = " << std::abs(x)
            << ", outside the validity window 0.9";
        throw validation_error(msg.str());
    }
    double ej = x * p2 / l;
    double phi_ext = -3.0 * (1.0 - x) * (1.0 - x) * p2 * target_c3_over_c2 / x;

    const double tol3 = 1e-6 * std::max(std::abs(target_c3_over_c2), 1e-3 / p2);
    const double tol4 = 1e-6 * std::max(std::abs(target_c4_over_c2), 1e-3 / p2);

    auto residual = [&](double ej_v, double phi_v) -> Eigen::Vector2d {
        const TaylorExpansion t = taylor_coefficients(make_squid(ej_v, l, phi_v, phi0));
        return {t.c3 / t.c2 - target_c3_over_c2, t.c4 / t.c2 - target_c4_over_c2};
    };

    Eigen::Vector2d r = residual(ej, phi_ext);
    Eigen::Vector2d best_r = r;
    double best_ej = ej, best_phi = phi_ext;
    for (int iter = 0; iter < 60; ++iter) {
        if (std::abs(r(0)) <= tol3 && std::abs(r(1)) <= tol4) {
            return make_squid(ej, l, phi_ext, phi0);
        }
        const double h_ej = 1e-6 * std::max(std::abs(ej), p2 / l);
        const double h_phi = 1e-6 * std::max(std::abs(phi_ext), phi0);
        Eigen::Matrix2d jac;
        jac.col(0) = (residual(ej + h_ej, phi_ext) - residual(ej - h_ej, phi_ext)) / (2.0 * h_ej);
        jac.col(1) =
            (residual(ej, phi_ext + h_phi) - residual(ej, phi_ext - h_phi)) / (2.0 * h_phi);
        Eigen::Vector2d step = jac.fullPivLu().solve(r);
        double scale = 1.0;
        for (int halving = 0; halving < 20; ++halving) {
            const double ej_try = ej - scale * step(0);
            const double phi_try = phi_ext - scale * step(1);
            Eigen::Vector2d r_try;
            try {
                r_try = residual(ej_try, phi_try);
            } catch (const validation_error&) {
                scale *= 0.5;
                continue;
            }
            if (r_try.norm() < r.norm() || scale < 1e-4) {
                ej = ej_try;
                phi_ext = phi_try;
                r = r_try;
                break;
            }
            scale *= 0.5;
        }
        if (r.norm() < best_r.norm()) {
            best_r = r;
            best_ej = ej;
            best_phi = phi_ext;
        }
    }
    std::ostringstream msg;
    msg << "design_anharmonicity: refinement did not converge; best residual ("
        << best_r(0) << ", " << best_r(1) << ") at ej=" << best_ej << ", phi_ext=" << best_phi;
    throw convergence_error(msg.str());
}

std::vector<std::pair<double, double>> potential_curve(const SquidCircuit& circuit,
                                                       const std::vector<double>& phi_grid) {
    validate(circuit);
    std::vector<std::pair<double, double>> samples;
    samples.reserve(phi_grid.size());
    for (double phi : phi_grid) {
        if (!std::isfinite(phi)) throw validation_error("potential_curve: grid must be finite");
        samples.emplace_back(phi, potential(circuit, phi));
    }
    return samples;
}

} // namespace fcemu
