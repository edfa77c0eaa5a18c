#include "fcemu/force_field.hpp"

#include <cmath>
#include <sstream>

#include "fcemu/errors.hpp"
#include "fcemu/linalg.hpp"

namespace fcemu {

void validate(const ForceField& ff) {
    const Eigen::Index n = ff.masses.size();
    if (n == 0) throw validation_error("force field: empty model");
    if (ff.hessian.rows() != n || ff.hessian.cols() != n) {
        throw validation_error("force field: hessian dimension does not match masses");
    }
    if (ff.equilibrium.size() != n) {
        throw validation_error("force field: equilibrium dimension does not match masses");
    }
    if ((ff.masses.array() <= 0.0).any()) {
        throw validation_error("force field: masses must be strictly positive");
    }
    if (!is_symmetric(ff.hessian, 1e-12)) {
        throw validation_error("force field: hessian is not symmetric (1e-12 relative)");
    }
    // PSD check happens in normal_modes where the spectrum is available anyway.
}

Eigen::MatrixXd mass_weighted_hessian(const ForceField& ff) {
    const Eigen::VectorXd inv_sqrt_m = ff.masses.array().rsqrt().matrix();
    return inv_sqrt_m.asDiagonal() * ff.hessian * inv_sqrt_m.asDiagonal();
}

NormalModes normal_modes(const ForceField& ff) {
    validate(ff);
    const Eigen::MatrixXd k = mass_weighted_hessian(ff);
    SymmetricEig eig = eig_sym(0.5 * (k + k.transpose()));

    const double hessian_scale = spectral_norm(ff.hessian);
    if (eig.values.minCoeff() < -psd_rel_tolerance * hessian_scale) {
        std::ostringstream msg;
        msg << "force field: mass-weighted hessian has negative eigenvalue "
            << eig.values.minCoeff() << " beyond tolerance";
        throw validation_error(msg.str());
    }

    const double top = eig.values.maxCoeff();
    const double kernel_cut = top > 0.0 ? kernel_rel_threshold * top : 0.0;

    NormalModes nm;
    nm.modes = eig.vectors;
    nm.frequencies = eig.values.cwiseMax(0.0).cwiseSqrt();
    nm.kernel_dim = 0;
    if (top <= 0.0) {
        nm.kernel_dim = eig.values.size();
        nm.frequencies.setZero();
    } else {
        for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
            if (eig.values(i) < kernel_cut) ++nm.kernel_dim;
        }
    }
    return nm;
}

ForceField remove_null_space(const ForceField& ff, const std::vector<double>& lambdas,
                             std::vector<std::string>* warnings) {
    const NormalModes nm = normal_modes(ff);
    if (static_cast<Eigen::Index>(lambdas.size()) != nm.kernel_dim) {
        std::ostringstream msg;
        msg << "remove_null_space: got " << lambdas.size() << " regulator frequencies, kernel dimension is "
            << nm.kernel_dim;
        throw validation_error(msg.str());
    }
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) {
            throw validation_error("remove_null_space: regulator frequencies must be positive");
        }
    }
    if (nm.kernel_dim == 0) return ff;

    if (warnings != nullptr) {
        for (double lambda : lambdas) {
            for (Eigen::Index i = nm.kernel_dim; i < nm.frequencies.size(); ++i) {
                const double w = nm.frequencies(i);
                if (std::abs(lambda - w) < 0.01 * w) {
                    std::ostringstream msg;
                    msg << "regulator frequency " << lambda
                        << " is within 1% of physical frequency " << w;
                    warnings->push_back(msg.str());
                }
            }
        }
    }

    Eigen::MatrixXd k = mass_weighted_hessian(ff);
    for (Eigen::Index j = 0; j < nm.kernel_dim; ++j) {
        const Eigen::VectorXd nu = nm.modes.col(j);
        k += lambdas[static_cast<std::size_t>(j)] * lambdas[static_cast<std::size_t>(j)] *
             (nu * nu.transpose());
    }
    const Eigen::VectorXd sqrt_m = ff.masses.array().sqrt().matrix();
    Eigen::MatrixXd regulated = sqrt_m.asDiagonal() * k * sqrt_m.asDiagonal();
    regulated = 0.5 * (regulated + regulated.transpose());

    ForceField out = ff;
    out.hessian = regulated;
    return out;
}

} // namespace fcemu
