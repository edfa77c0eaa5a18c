#include "fcemu/linalg.hpp"

#include <cmath>

#include "fcemu/errors.hpp"

namespace fcemu {

Eigen::MatrixXd symplectic_form(Eigen::Index n_modes) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    sigma.topRightCorner(n_modes, n_modes) = Eigen::MatrixXd::Identity(n_modes, n_modes);
    sigma.bottomLeftCorner(n_modes, n_modes) = -Eigen::MatrixXd::Identity(n_modes, n_modes);
    return sigma;
}

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

double symplectic_defect(const Eigen::Ref<const Eigen::MatrixXd>& u) {
    const Eigen::Index n = u.rows() / 2;
    const Eigen::MatrixXd sigma = symplectic_form(n);
    return spectral_norm(u.transpose() * sigma * u - sigma);
}

bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = m.norm();
    if (scale == 0.0) return true;
    return (m - m.transpose()).norm() <= rel_tol * scale;
}

SymmetricEig eig_sym(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("eig_sym: eigendecomposition failed");
    }
    SymmetricEig out{solver.eigenvalues(), solver.eigenvectors()};
    // Fix the sign of each eigenvector: largest-magnitude entry positive.
    for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
        Eigen::Index imax = 0;
        out.vectors.col(c).cwiseAbs().maxCoeff(&imax);
        if (out.vectors(imax, c) < 0.0) out.vectors.col(c) *= -1.0;
    }
    return out;
}

namespace {

Eigen::MatrixXd spd_power(const Eigen::Ref<const Eigen::MatrixXd>& m, double exponent,
                          const char* who) {
    if (!is_symmetric(m, 1e-10)) {
        throw validation_error(std::string(who) + ": matrix is not symmetric");
    }
    const SymmetricEig eig = eig_sym(m);
    const double scale = eig.values.cwiseAbs().maxCoeff();
    if (eig.values.minCoeff() <= 1e-14 * scale) {
        throw validation_error(std::string(who) + ": matrix is not positive definite");
    }
    const Eigen::VectorXd powered =
        eig.values.array().pow(exponent).matrix();
    return eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
}

} // namespace

Eigen::MatrixXd symmetric_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    return spd_power(m, 0.5, "symmetric_sqrt");
}

Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    return spd_power(m, -0.5, "symmetric_inv_sqrt");
}

} // namespace fcemu
