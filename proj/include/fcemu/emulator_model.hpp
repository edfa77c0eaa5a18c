#pragma once

#include <Eigen/Dense>

namespace fcemu {

// Tuneable oscillator array:
//   H = 1/2 q^T C^-1 q + 1/2 phi^T B phi - phi^T V
// C is the capacitance matrix (mass role), B the coupling matrix
// (inverse-inductance role), V the driving vector. kappa records the
// frequency rescaling applied when the model was synthesized from a
// molecular force field.
struct EmulatorModel {
    Eigen::MatrixXd capacitance;
    Eigen::MatrixXd coupling;
    Eigen::VectorXd driving;
    double kappa = 1.0;
};

void validate(const EmulatorModel& model);

// The same Hamiltonian in scaled canonical coordinates
//   phi = C^-1/2 X,  q = C^1/2 P,  R = (X_1..X_N, P_1..P_N):
//   H = 1/2 P^T P + 1/2 X^T stiffness X - X^T drive
struct RQuadratic {
    Eigen::MatrixXd stiffness; // C^-1/2 B C^-1/2
    Eigen::VectorXd drive;     // C^-1/2 V
};

RQuadratic r_form(const EmulatorModel& model);

// Eigenfrequencies of C^-1/2 B C^-1/2, ascending, clamped at zero.
Eigen::VectorXd mode_frequencies(const EmulatorModel& model);

} // namespace fcemu
