#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fcemu/gaussian_state.hpp"
#include "fcemu/protocol.hpp"

namespace fcemu {

// Interpolation profile g(s) with g(0) = 0, g(1) = 1 applied to couplings and
// (inverted) to the start driving during the switch window.
struct SwitchProfile {
    enum class Kind { linear, smoothstep, piecewise_constant };
    Kind kind = Kind::linear;
    double step_fraction = 0.5; // jump location for piecewise_constant

    double value(double s) const;
    // Interior discontinuities in (0, 1); integration substeps align on these.
    std::vector<double> breakpoints() const;
};

struct IntegratorControl {
    int min_substeps = 8;
    double tolerance = 1e-11; // accepted step-doubling defect
    int max_doublings = 16;
};

struct QuenchSchedule {
    ProtocolPlan plan;
    Eigen::MatrixXd capacitance;
    double t_sw = 0.0;
    SwitchProfile profile;
    IntegratorControl control;
};

void validate(const QuenchSchedule& schedule);

// Fundamental solution of the switch window in R coordinates:
//   R(t1) = matrix * R(t0) + inhomogeneous
struct Propagator {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd inhomogeneous;
};

Propagator propagate(const QuenchSchedule& schedule);
Propagator propagate(const QuenchSchedule& schedule, double t0, double t1);

GaussianState evolve_state(const GaussianState& state, const Propagator& propagator);

// Largest eigenfrequency over the start and end configurations of a plan.
double plan_omega_max(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance);

// Switch-time budget epsilon * min(1/Omega_max, 2/||C^-1/2 v_start||),
// with the order-one constant fixed to one.
double diabatic_bound(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance,
                      double epsilon);

// Advisory switch-time cap in the presence of cubic/quartic circuit
// nonlinearities: min over n of 1 / (c_n ||C^-1/2 v_start||^(n/2)).
// No nonlinear dynamics are simulated.
double nonlinear_bound_advisory(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance,
                                double c3, double c4);

struct DiabaticityReport {
    double t_bound = 0.0;         // bound per unit epsilon
    double norm_deviation = 0.0;  // ||U - I|| (spectral)
    double drive_deviation = 0.0; // ||R_drive||
    bool magnus_converged = true; // t_sw * Omega_max < 1
};

DiabaticityReport diabaticity_report(const QuenchSchedule& schedule);

struct SweepRow {
    double t_sw;
    double t_sw_omega_max;
    double mean_norm_diff;
    double variance;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double slope = 0.0;       // log-log fit over the converged rows
    int converged_points = 0; // rows with t_sw * Omega_max < 1
};

// Evolves the complete orthogonal set of initial conditions (the identity
// columns in R space) through the switch for each grid value and records the
// mean and population variance of ||R(t_sw) - R(0)|| across columns.
SweepResult error_scaling_sweep(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance,
                                const std::vector<double>& t_sw_grid, int threads = 1);

} // namespace fcemu
