#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fcemu {

// One electronic configuration of a molecular harmonic model:
//   H = 1/2 p^T M^-1 p + 1/2 (x - v)^T A (x - v)
// in internal units (hbar = 1). `masses` is the diagonal of M.
struct ForceField {
    Eigen::VectorXd masses;
    Eigen::MatrixXd hessian;
    Eigen::VectorXd equilibrium;
    std::string label;
};

// Relative eigenvalue threshold below which a mode counts as rigid (zero mode).
inline constexpr double kernel_rel_threshold = 1e-9;
// Mass-weighted Hessian eigenvalues may dip this far below zero (times ||A||)
// before the model is rejected as non-positive-semidefinite.
inline constexpr double psd_rel_tolerance = 1e-10;

void validate(const ForceField& ff);

Eigen::MatrixXd mass_weighted_hessian(const ForceField& ff);

struct NormalModes {
    Eigen::VectorXd frequencies; // ascending, clamped at zero
    Eigen::MatrixXd modes;       // orthogonal; columns are mass-weighted eigenvectors
    Eigen::Index kernel_dim = 0;
};

NormalModes normal_modes(const ForceField& ff);

// Regulates the rigid-mode null space: adds lambda_j^2 rank-one terms along an
// orthonormal kernel basis of the mass-weighted Hessian, then transforms back,
// which leaves every physical eigenfrequency untouched. lambdas.size() must
// equal the kernel dimension. Regulator frequencies within 1% of a physical
// frequency are reported through `warnings` when provided.
ForceField remove_null_space(const ForceField& ff, const std::vector<double>& lambdas,
                             std::vector<std::string>* warnings = nullptr);

} // namespace fcemu
