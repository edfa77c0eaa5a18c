#include "fcemu/emulator_model.hpp"

#include "fcemu/errors.hpp"
#include "fcemu/linalg.hpp"

namespace fcemu {

void validate(const EmulatorModel& model) {
    const Eigen::Index n = model.capacitance.rows();
    if (n == 0) throw validation_error("emulator model: empty model");
    if (model.capacitance.cols() != n) {
        throw validation_error("emulator model: capacitance must be square");
    }
    if (model.coupling.rows() != n || model.coupling.cols() != n) {
        throw validation_error("emulator model: coupling dimension mismatch");
    }
    if (model.driving.size() != n) {
        throw validation_error("emulator model: driving dimension mismatch");
    }
    if (!is_symmetric(model.capacitance, 1e-10)) {
        throw validation_error("emulator model: capacitance is not symmetric");
    }
    if (!is_symmetric(model.coupling, 1e-10)) {
        throw validation_error("emulator model: coupling is not symmetric");
    }
    const SymmetricEig ec = eig_sym(model.capacitance);
    if (ec.values.minCoeff() <= 0.0) {
        throw validation_error("emulator model: capacitance is not positive definite");
    }
    if (!(model.kappa > 0.0)) {
        throw validation_error("emulator model: kappa must be positive");
    }
}

RQuadratic r_form(const EmulatorModel& model) {
    const Eigen::MatrixXd c_inv_sqrt = symmetric_inv_sqrt(model.capacitance);
    RQuadratic rq;
    rq.stiffness = c_inv_sqrt * model.coupling * c_inv_sqrt;
    rq.stiffness = 0.5 * (rq.stiffness + rq.stiffness.transpose());
    rq.drive = c_inv_sqrt * model.driving;
    return rq;
}

Eigen::VectorXd mode_frequencies(const EmulatorModel& model) {
    const RQuadratic rq = r_form(model);
    const SymmetricEig eig = eig_sym(rq.stiffness);
    return eig.values.cwiseMax(0.0).cwiseSqrt();
}

} // namespace fcemu
