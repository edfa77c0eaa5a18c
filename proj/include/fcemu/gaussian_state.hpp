#pragma once

#include <Eigen/Dense>

#include "fcemu/emulator_model.hpp"

namespace fcemu {

// Gaussian state over canonical operators R = (X_1..X_N, P_1..P_N):
// first moments r = <R> and centered anticommutator matrix
//   Gamma_jk = <{R_j - r_j, R_k - r_k}>.
struct GaussianState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd second_moments;
};

// Symmetry and the uncertainty relation Gamma + i sigma >= 0.
void validate(const GaussianState& state);

// True when every symplectic eigenvalue equals one: (Gamma sigma^-1)^2 = -I.
bool is_pure(const GaussianState& state, double tol = 1e-8);

// Stationary Gaussian states of a model. The mean solves B phi = V; the
// covariance is the vacuum (or coth-scaled thermal) covariance of the
// normal modes of C^-1/2 B C^-1/2.
GaussianState ground_state(const EmulatorModel& model);
GaussianState thermal_state(const EmulatorModel& model, double temperature);

// <H> = 1/4 Tr(D Gamma) + 1/2 r^T D r - W^T r with D, W the R-coordinate
// Hamiltonian of `model`.
double mean_energy(const GaussianState& state, const EmulatorModel& model);

} // namespace fcemu
