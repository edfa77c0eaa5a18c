#pragma once

#include <Eigen/Dense>

namespace fcemu {

// Canonical symplectic form sigma for N modes in (X_1..X_N, P_1..P_N) ordering:
//   sigma = [[0, I], [-I, 0]]
Eigen::MatrixXd symplectic_form(Eigen::Index n_modes);

// Largest singular value.
double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m);

// ||U^T sigma U - sigma|| in spectral norm; zero for exactly symplectic U.
double symplectic_defect(const Eigen::Ref<const Eigen::MatrixXd>& u);

bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, double rel_tol = 1e-12);

// Self-adjoint eigendecomposition with ascending eigenvalues and
// sign-canonical eigenvectors (largest-magnitude component positive),
// so repeated runs and trivially diagonal inputs give reproducible bases.
struct SymmetricEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
SymmetricEig eig_sym(const Eigen::Ref<const Eigen::MatrixXd>& m);

// Principal square root / inverse square root of a symmetric positive-definite matrix.
Eigen::MatrixXd symmetric_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& m);
Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& m);

} // namespace fcemu
