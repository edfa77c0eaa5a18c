#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fcemu/force_field.hpp"
#include "fcemu/gaussian_state.hpp"
#include "fcemu/protocol.hpp"

namespace fcemu {

struct SpectralLine {
    double energy;      // relative to the final zero point
    double probability;
    std::vector<std::vector<int>> occupations; // merged lines keep every label
};

struct LineSpectrum {
    std::vector<SpectralLine> lines; // sorted by energy
    double truncation_tail = 0.0;    // 1 - sum of retained probabilities
    double zero_point = 0.0;         // final-configuration zero-point energy
};

// Vibrational overlap problem in unit-mass coordinates: the ground state of
// `stiffness_initial` centered at `displacement` against the eigenstates of
// `stiffness_final` centered at the origin.
struct OverlapProblem {
    Eigen::MatrixXd stiffness_initial;
    Eigen::MatrixXd stiffness_final;
    Eigen::VectorXd displacement;
};

OverlapProblem overlap_problem(const ForceField& initial, const ForceField& final_ff);
OverlapProblem overlap_problem(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance);

struct FcpOptions {
    int n_max = 10;           // per-mode occupation cutoff
    int quadrature_order = 0; // base Gauss-Hermite order; 0 = automatic
    std::vector<double> regulator_frequencies; // excluded-mode consistency check
    double regulator_match_tol = 0.01;
    int threads = 1;
};

// Computes the level populations by multidimensional Gauss-Hermite overlap
// integrals, then assembles a line spectrum with degenerate energies merged.
// Limited to four modes; convergence is certified by doubling the
// quadrature order and requiring every retained probability stable to 1e-8.
LineSpectrum franck_condon_profile(const OverlapProblem& problem, const FcpOptions& options);
LineSpectrum franck_condon_profile(const ForceField& initial, const ForceField& final_ff,
                                   int n_max, int quadrature_order = 0);

struct MomentReport {
    double spectrum_mean = 0.0; // sum p * E
    double model_mean = 0.0;    // <H_final> - zero point
    double abs_discrepancy = 0.0;
    double rel_discrepancy = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Checks sum(p E) against mean_energy(initial_state, final_model) minus the
// zero point; passes when the discrepancy stays within
// max(1e-6, 3 * truncation_tail * E_max).
MomentReport moment_check(const LineSpectrum& spectrum, const GaussianState& initial_state,
                          const EmulatorModel& final_model);

struct Histogram {
    double bin_width = 0.0;
    std::vector<double> mass; // bin k covers [k w, (k+1) w)
};

Histogram binned_profile(const LineSpectrum& spectrum, double bin_width);

// Gauss-Hermite rule for weight exp(-x^2), exposed for oracle tests.
struct GaussHermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
GaussHermiteRule gauss_hermite(int order);

} // namespace fcemu
