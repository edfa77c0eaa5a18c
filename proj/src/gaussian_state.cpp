#include "fcemu/gaussian_state.hpp"

#include <cmath>
#include <complex>

#include "fcemu/errors.hpp"
#include "fcemu/linalg.hpp"

namespace fcemu {

void validate(const GaussianState& state) {
    const Eigen::Index dim = state.mean.size();
    if (dim == 0 || dim % 2 != 0) {
        throw validation_error("gaussian state: mean must have even, nonzero dimension");
    }
    if (state.second_moments.rows() != dim || state.second_moments.cols() != dim) {
        throw validation_error("gaussian state: second-moment dimension mismatch");
    }
    if (!is_symmetric(state.second_moments, 1e-10)) {
        throw validation_error("gaussian state: second moments not symmetric");
    }
    const Eigen::Index n = dim / 2;
    Eigen::MatrixXcd test = state.second_moments.cast<std::complex<double>>();
    test += std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(test);
    const double scale = state.second_moments.norm() + 1.0;
    if (solver.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw validation_error("gaussian state: uncertainty relation violated");
    }
}

bool is_pure(const GaussianState& state, double tol) {
    const Eigen::Index n = state.mean.size() / 2;
    const Eigen::MatrixXd sigma = symplectic_form(n);
    // sigma^-1 = -sigma
    const Eigen::MatrixXd gs = state.second_moments * (-sigma);
    const Eigen::MatrixXd sq = gs * gs;
    return (sq + Eigen::MatrixXd::Identity(2 * n, 2 * n)).norm() <= tol * sq.norm();
}

namespace {

struct ModeBasis {
    Eigen::VectorXd omega;    // mode frequencies, ascending
    Eigen::MatrixXd vectors;  // orthogonal
    Eigen::VectorXd x_star;   // stationary X
};

ModeBasis stationary_basis(const EmulatorModel& model) {
    validate(model);
    const RQuadratic rq = r_form(model);
    const SymmetricEig eig = eig_sym(rq.stiffness);
    const double top = eig.values.cwiseAbs().maxCoeff();
    if (eig.values.minCoeff() <= 1e-12 * top || top == 0.0) {
        throw validation_error(
            "state preparation: coupling matrix is singular; remove the null space first");
    }
    ModeBasis basis;
    basis.omega = eig.values.cwiseSqrt();
    basis.vectors = eig.vectors;
    basis.x_star = eig.vectors *
                   (eig.vectors.transpose() * rq.drive).cwiseQuotient(eig.values);
    return basis;
}

GaussianState assemble(const ModeBasis& basis, const Eigen::VectorXd& scale_x,
                       const Eigen::VectorXd& scale_p) {
    const Eigen::Index n = basis.omega.size();
    GaussianState state;
    state.mean = Eigen::VectorXd::Zero(2 * n);
    state.mean.head(n) = basis.x_star;
    state.second_moments = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    state.second_moments.topLeftCorner(n, n) =
        basis.vectors * scale_x.asDiagonal() * basis.vectors.transpose();
    state.second_moments.bottomRightCorner(n, n) =
        basis.vectors * scale_p.asDiagonal() * basis.vectors.transpose();
    return state;
}

} // namespace

GaussianState ground_state(const EmulatorModel& model) {
    const ModeBasis basis = stationary_basis(model);
    const Eigen::VectorXd gx = basis.omega.cwiseInverse();
    const Eigen::VectorXd gp = basis.omega;
    return assemble(basis, gx, gp);
}

GaussianState thermal_state(const EmulatorModel& model, double temperature) {
    if (temperature < 0.0) {
        throw validation_error("thermal_state: temperature must be nonnegative");
    }
    if (temperature == 0.0) return ground_state(model);
    const ModeBasis basis = stationary_basis(model);
    Eigen::VectorXd occupancy(basis.omega.size());
    for (Eigen::Index i = 0; i < basis.omega.size(); ++i) {
        occupancy(i) = 1.0 / std::tanh(basis.omega(i) / (2.0 * temperature));
    }
    const Eigen::VectorXd gx = occupancy.cwiseQuotient(basis.omega);
    const Eigen::VectorXd gp = occupancy.cwiseProduct(basis.omega);
    return assemble(basis, gx, gp);
}

double mean_energy(const GaussianState& state, const EmulatorModel& model) {
    validate(model);
    const Eigen::Index n = model.capacitance.rows();
    if (state.mean.size() != 2 * n) {
        throw validation_error("mean_energy: state and model dimensions disagree");
    }
    const RQuadratic rq = r_form(model);
    const auto x = state.mean.head(n);
    const auto p = state.mean.tail(n);
    const auto gxx = state.second_moments.topLeftCorner(n, n);
    const auto gpp = state.second_moments.bottomRightCorner(n, n);
    const double trace_term = 0.25 * ((rq.stiffness * gxx).trace() + gpp.trace());
    const double mean_term = 0.5 * (x.dot(rq.stiffness * x) + p.squaredNorm());
    return trace_term + mean_term - rq.drive.dot(x);
}

} // namespace fcemu
