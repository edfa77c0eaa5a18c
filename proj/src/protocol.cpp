#include "fcemu/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcemu/errors.hpp"
#include "fcemu/linalg.hpp"

namespace fcemu {

void validate(const HardwareConstraints& hw) {
    if (!(hw.omega_min > 0.0) || !(hw.omega_max > 0.0) || !(hw.b_max > 0.0) || !(hw.t_cryo > 0.0)) {
        throw validation_error("hardware constraints: all entries must be positive");
    }
    if (!(hw.omega_min < hw.omega_max)) {
        throw validation_error("hardware constraints: omega_min must be below omega_max");
    }
}

EmulatorModel rescale(const ForceField& ff, const Eigen::MatrixXd& capacitance, double kappa) {
    validate(ff);
    if (!(kappa > 0.0)) throw validation_error("rescale: kappa must be positive");
    if (capacitance.rows() != ff.masses.size() || capacitance.cols() != ff.masses.size()) {
        throw validation_error("rescale: capacitance dimension mismatch");
    }
    const Eigen::MatrixXd c_sqrt = symmetric_sqrt(capacitance);
    const Eigen::VectorXd inv_sqrt_m = ff.masses.array().rsqrt().matrix();

    EmulatorModel model;
    model.capacitance = capacitance;
    model.kappa = kappa;
    const Eigen::MatrixXd core = inv_sqrt_m.asDiagonal() * ff.hessian * inv_sqrt_m.asDiagonal();
    model.coupling = kappa * kappa * (c_sqrt * core * c_sqrt);
    model.coupling = 0.5 * (model.coupling + model.coupling.transpose());
    model.driving = std::pow(kappa, 1.5) *
                    (c_sqrt * (inv_sqrt_m.asDiagonal() * (ff.hessian * ff.equilibrium)));
    return model;
}

namespace {

struct SpectrumSummary {
    double omega_min;
    double omega_max;
};

SpectrumSummary combined_spectrum(const NormalModes& a, const NormalModes& b) {
    if (a.frequencies.size() == 0 || b.frequencies.size() == 0) {
        throw validation_error("choose_kappa: empty mode list");
    }
    SpectrumSummary s;
    s.omega_max = std::max(a.frequencies.maxCoeff(), b.frequencies.maxCoeff());
    s.omega_min = std::min(a.frequencies.minCoeff(), b.frequencies.minCoeff());
    if (!(s.omega_max > 0.0)) {
        throw validation_error("choose_kappa: largest molecular frequency must be positive");
    }
    return s;
}

} // namespace

double choose_kappa(const NormalModes& initial, const NormalModes& final_modes,
                    const HardwareConstraints& hw, const KappaStrategy& strategy) {
    validate(hw);
    const SpectrumSummary s = combined_spectrum(initial, final_modes);

    double kappa = 0.0;
    if (std::holds_alternative<FrequencyCap>(strategy)) {
        kappa = hw.omega_max / s.omega_max;
    } else if (const auto* tm = std::get_if<TemperatureMatch>(&strategy)) {
        if (!(tm->t_molecule > 0.0)) {
            throw validation_error("choose_kappa: molecular temperature must be positive");
        }
        // Equal thermal occupation: Omega / T_cryo = omega / T_molecule.
        kappa = hw.t_cryo / tm->t_molecule;
    } else {
        const auto& cc = std::get<CouplingCap>(strategy);
        if (!(cc.capacitance_scale > 0.0)) {
            throw validation_error("choose_kappa: capacitance scale must be positive");
        }
        // |B_kl| <= ||B|| <= lambda_max(C) kappa^2 omega_max^2, so capping the
        // effective frequency at sqrt(b_max / lambda_max(C)) keeps every
        // coupling element within b_max.
        kappa = std::sqrt(hw.b_max / cc.capacitance_scale) / s.omega_max;
    }

    const double lo = kappa * s.omega_min;
    const double hi = kappa * s.omega_max;
    if (lo < hw.omega_min * (1.0 - 1e-12) || hi > hw.omega_max * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "choose_kappa: dynamical range violation; rescaled spectrum [" << lo << ", " << hi
            << "] does not fit the hardware window [" << hw.omega_min << ", " << hw.omega_max
            << "] (spectral ratio " << s.omega_max / s.omega_min << " vs window ratio "
            << hw.omega_max / hw.omega_min << ")";
        throw validation_error(msg.str());
    }
    return kappa;
}

void validate(const ProtocolPlan& plan) {
    const Eigen::Index n = plan.b_start.rows();
    if (n == 0 || plan.b_start.cols() != n || plan.b_end.rows() != n || plan.b_end.cols() != n) {
        throw validation_error("protocol plan: coupling matrices must be square and matching");
    }
    if (plan.v_start.size() != n || plan.v_end.size() != n) {
        throw validation_error("protocol plan: driving dimension mismatch");
    }
    if (plan.v_end.norm() != 0.0) {
        throw validation_error("protocol plan: end driving must vanish");
    }
    if (!is_symmetric(plan.b_start, 1e-10) || !is_symmetric(plan.b_end, 1e-10)) {
        throw validation_error("protocol plan: couplings must be symmetric");
    }
    if (plan.mode == PlanMode::normal_mode) {
        Eigen::MatrixXd off = plan.b_end;
        off.diagonal().setZero();
        if (off.norm() > 1e-12 * std::max(1.0, plan.b_end.norm())) {
            throw validation_error("protocol plan: normal-mode end coupling must be diagonal");
        }
        if (plan.basis.rows() != n || plan.basis.cols() != n) {
            throw validation_error("protocol plan: normal-mode plan needs a basis");
        }
    }
    if (!(plan.kappa > 0.0)) throw validation_error("protocol plan: kappa must be positive");
}

namespace {

void require_null_space_free(const ForceField& ff, const NormalModes& nm, const char* role) {
    if (nm.kernel_dim != 0) {
        std::ostringstream msg;
        msg << "plan: " << role << " configuration '" << ff.label << "' has " << nm.kernel_dim
            << " zero modes; remove the null space first";
        throw validation_error(msg.str());
    }
}

} // namespace

ProtocolPlan plan_protocol1(const ForceField& initial, const ForceField& final_ff,
                            const HardwareConstraints& hw, const Eigen::MatrixXd& capacitance,
                            const KappaStrategy& strategy) {
    validate(initial);
    validate(final_ff);
    if (initial.masses.size() != final_ff.masses.size()) {
        throw validation_error("plan: configurations must share dimension");
    }
    const NormalModes nm0 = normal_modes(initial);
    const NormalModes nmf = normal_modes(final_ff);
    require_null_space_free(initial, nm0, "initial");
    require_null_space_free(final_ff, nmf, "final");

    const double kappa = choose_kappa(nm0, nmf, hw, strategy);

    // Work in coordinates centered on the final equilibrium, where the end
    // driving vanishes; the start equilibrium becomes the relative shift.
    ForceField shifted_initial = initial;
    shifted_initial.equilibrium = initial.equilibrium - final_ff.equilibrium;
    ForceField shifted_final = final_ff;
    shifted_final.equilibrium.setZero();

    const EmulatorModel m0 = rescale(shifted_initial, capacitance, kappa);
    const EmulatorModel mf = rescale(shifted_final, capacitance, kappa);

    ProtocolPlan plan;
    plan.b_start = m0.coupling;
    plan.b_end = mf.coupling;
    plan.v_start = m0.driving - mf.driving;
    plan.v_end = Eigen::VectorXd::Zero(m0.driving.size());
    plan.mode = PlanMode::force_field;
    plan.kappa = kappa;
    return plan;
}

ProtocolPlan plan_protocol2(const ForceField& initial, const ForceField& final_ff,
                            const HardwareConstraints& hw, const Eigen::MatrixXd& capacitance,
                            const KappaStrategy& strategy, std::vector<std::string>* warnings) {
    ProtocolPlan plan = plan_protocol1(initial, final_ff, hw, capacitance, strategy);

    const SymmetricEig eig = eig_sym(plan.b_end);
    const Eigen::MatrixXd& basis = eig.vectors;
    plan.b_start = basis.transpose() * plan.b_start * basis;
    plan.b_start = 0.5 * (plan.b_start + plan.b_start.transpose());
    plan.b_end = Eigen::MatrixXd(eig.values.asDiagonal());
    plan.v_start = basis.transpose() * plan.v_start;
    plan.basis = basis;
    plan.mode = PlanMode::normal_mode;

    if (warnings != nullptr) {
        const Eigen::MatrixXd product =
            capacitance.ldlt().solve(Eigen::MatrixXd(plan.b_end));
        Eigen::MatrixXd off = product;
        off.diagonal().setZero();
        if (off.norm() > 1e-10 * std::max(1.0, product.norm())) {
            warnings->push_back(
                "residual mutual capacitance keeps the final resonators weakly coupled "
                "(C^-1 b_end is not diagonal); per-mode measurements may see cross-talk");
        }
    }
    return plan;
}

EmulatorModel start_model(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance) {
    validate(plan);
    return EmulatorModel{capacitance, plan.b_start, plan.v_start, plan.kappa};
}

EmulatorModel end_model(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance) {
    validate(plan);
    return EmulatorModel{capacitance, plan.b_end, plan.v_end, plan.kappa};
}

Eigen::VectorXd ObservableMap::position_to_emulator(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd sqrt_m = masses.array().sqrt().matrix();
    return symmetric_inv_sqrt(capacitance) * (sqrt_m.asDiagonal() * x) / std::sqrt(kappa);
}

Eigen::VectorXd ObservableMap::position_to_molecule(const Eigen::VectorXd& phi) const {
    const Eigen::VectorXd inv_sqrt_m = masses.array().rsqrt().matrix();
    return std::sqrt(kappa) * (inv_sqrt_m.asDiagonal() * (symmetric_sqrt(capacitance) * phi));
}

Eigen::VectorXd ObservableMap::momentum_to_emulator(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd inv_sqrt_m = masses.array().rsqrt().matrix();
    return std::sqrt(kappa) * (symmetric_sqrt(capacitance) * (inv_sqrt_m.asDiagonal() * p));
}

Eigen::VectorXd ObservableMap::momentum_to_molecule(const Eigen::VectorXd& q) const {
    const Eigen::VectorXd sqrt_m = masses.array().sqrt().matrix();
    return sqrt_m.asDiagonal() * (symmetric_inv_sqrt(capacitance) * q) / std::sqrt(kappa);
}

namespace {

void push_range(CircuitTable& table, const std::string& quantity, const std::string& unit,
                double lo, double hi) {
    table.rows.push_back({"min", quantity, lo, unit});
    table.rows.push_back({"max", quantity, hi, unit});
}

} // namespace

CircuitTable circuit_table(const EmulatorModel& start, const EmulatorModel& end,
                           const units::CircuitCalibration& calibration) {
    validate(start);
    validate(end);
    const double cap_diff = (start.capacitance - end.capacitance).norm();
    if (cap_diff > 1e-12 * std::max(1.0, start.capacitance.norm()) ||
        std::abs(start.kappa - end.kappa) > 1e-12 * start.kappa) {
        throw validation_error("circuit_table: models must share capacitance and kappa");
    }
    const Eigen::Index n = start.capacitance.rows();
    CircuitTable table;

    auto index1 = [](Eigen::Index i) { return std::to_string(i); };
    auto index2 = [](Eigen::Index i, Eigen::Index j) {
        return std::to_string(i) + ":" + std::to_string(j);
    };

    double c_lo = 0.0, c_hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double value = start.capacitance(i, j);
            if (i != j && value == 0.0) continue;
            const double pf = calibration.capacitance_to_pf(value);
            table.rows.push_back({i == j ? index1(i) : index2(i, j), "capacitance", pf, "pF"});
            if (i == j) {
                if (c_lo == 0.0 && c_hi == 0.0) c_lo = c_hi = pf;
                c_lo = std::min(c_lo, pf);
                c_hi = std::max(c_hi, pf);
            }
        }
    }

    double b_lo = 0.0, b_hi = 0.0;
    bool b_seen = false;
    auto emit_coupling = [&](const Eigen::MatrixXd& b, const std::string& quantity) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i; j < n; ++j) {
                const double inv_nh = calibration.coupling_to_inv_nh(b(i, j));
                table.rows.push_back({index2(i, j), quantity, inv_nh, "1/nH"});
                const double mag = std::abs(inv_nh);
                if (mag > 0.0) {
                    if (!b_seen) {
                        b_lo = b_hi = mag;
                        b_seen = true;
                    }
                    b_lo = std::min(b_lo, mag);
                    b_hi = std::max(b_hi, mag);
                }
            }
        }
    };
    emit_coupling(start.coupling, "coupling_initial");
    emit_coupling(end.coupling, "coupling_final");

    const Eigen::VectorXd f0 = mode_frequencies(start);
    const Eigen::VectorXd ff = mode_frequencies(end);
    for (Eigen::Index i = 0; i < n; ++i) {
        table.rows.push_back(
            {index1(i), "frequency_initial", units::internal_to_ghz(f0(i)), "GHz"});
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        table.rows.push_back({index1(i), "frequency_final", units::internal_to_ghz(ff(i)), "GHz"});
    }

    const Eigen::VectorXd delta_v = start.driving - end.driving;
    for (Eigen::Index i = 0; i < n; ++i) {
        table.rows.push_back(
            {index1(i), "drive_delta", calibration.driving_to_na(std::abs(delta_v(i))), "nA"});
    }

    push_range(table, "capacitance", "pF", c_lo, c_hi);
    if (b_seen) push_range(table, "coupling", "1/nH", b_lo, b_hi);
    const double f_lo = std::min(f0.minCoeff(), ff.minCoeff());
    const double f_hi = std::max(f0.maxCoeff(), ff.maxCoeff());
    push_range(table, "frequency", "GHz", units::internal_to_ghz(f_lo),
               units::internal_to_ghz(f_hi));
    const Eigen::VectorXd abs_dv = delta_v.cwiseAbs();
    push_range(table, "drive_delta", "nA", calibration.driving_to_na(abs_dv.minCoeff()),
               calibration.driving_to_na(abs_dv.maxCoeff()));
    return table;
}

} // namespace fcemu
