#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fcemu/force_field.hpp"

namespace test_support {

// Haar-ish random orthogonal matrix via QR with sign-fixed diagonal.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

// Symmetric matrix with the given eigenvalues in a random basis.
inline Eigen::MatrixXd random_symmetric_with_spectrum(const Eigen::VectorXd& eigenvalues,
                                                      std::mt19937& rng) {
    const Eigen::MatrixXd q = random_orthogonal(eigenvalues.size(), rng);
    Eigen::MatrixXd m = q * eigenvalues.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937& rng, double lo = 0.5,
                                  double hi = 2.0) {
    std::uniform_real_distribution<double> uniform(lo, hi);
    Eigen::VectorXd eigenvalues(n);
    for (Eigen::Index i = 0; i < n; ++i) eigenvalues(i) = uniform(rng);
    return random_symmetric_with_spectrum(eigenvalues, rng);
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    return v;
}

// Random full-rank force field with frequencies in [w_lo, w_hi].
inline fcemu::ForceField random_force_field(Eigen::Index n, std::mt19937& rng, double w_lo = 0.5,
                                            double w_hi = 2.0, double displacement_scale = 0.1) {
    std::uniform_real_distribution<double> mass_dist(0.5, 4.0);
    std::uniform_real_distribution<double> freq_dist(w_lo, w_hi);
    Eigen::VectorXd masses(n);
    for (Eigen::Index i = 0; i < n; ++i) masses(i) = mass_dist(rng);
    Eigen::VectorXd omega2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = freq_dist(rng);
        omega2(i) = w * w;
    }
    const Eigen::MatrixXd k = random_symmetric_with_spectrum(omega2, rng);
    const Eigen::VectorXd sqrt_m = masses.array().sqrt().matrix();
    Eigen::MatrixXd hessian = sqrt_m.asDiagonal() * k * sqrt_m.asDiagonal();
    hessian = 0.5 * (hessian + hessian.transpose());
    return fcemu::ForceField{masses, hessian, random_vector(n, rng, displacement_scale), "rand"};
}

} // namespace test_support
