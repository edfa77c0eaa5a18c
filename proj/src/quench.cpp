#include "fcemu/quench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "fcemu/errors.hpp"
#include "fcemu/linalg.hpp"

namespace fcemu {

double SwitchProfile::value(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    switch (kind) {
        case Kind::linear:
            return s;
        case Kind::smoothstep:
            return s * s * (3.0 - 2.0 * s);
        case Kind::piecewise_constant:
            return s < step_fraction ? 0.0 : 1.0;
    }
    return s;
}

std::vector<double> SwitchProfile::breakpoints() const {
    if (kind == Kind::piecewise_constant && step_fraction > 0.0 && step_fraction < 1.0) {
        return {step_fraction};
    }
    return {};
}

void validate(const QuenchSchedule& schedule) {
    validate(schedule.plan);
    if (schedule.capacitance.rows() != schedule.plan.b_start.rows() ||
        schedule.capacitance.cols() != schedule.plan.b_start.cols()) {
        throw validation_error("quench schedule: capacitance dimension mismatch");
    }
    if (schedule.t_sw < 0.0) {
        throw validation_error("quench schedule: switch time must be nonnegative");
    }
    if (schedule.control.min_substeps < 1 || schedule.control.tolerance <= 0.0) {
        throw validation_error("quench schedule: invalid integrator control");
    }
}

namespace {

// Switch-window Hamiltonian pieces in R coordinates.
struct SwitchWindow {
    Eigen::MatrixXd k_start;  // C^-1/2 b_start C^-1/2
    Eigen::MatrixXd k_end;    // C^-1/2 b_end C^-1/2
    Eigen::VectorXd w_start;  // C^-1/2 v_start
    double t_sw;
    SwitchProfile profile;

    Eigen::Index modes() const { return k_start.rows(); }

    // dR/dt = A(t) R + b(t) with A = sigma D, b = -sigma W.
    void generator(double t, Eigen::MatrixXd& a, Eigen::VectorXd& b) const {
        const Eigen::Index n = modes();
        const double s = t_sw > 0.0 ? t / t_sw : 1.0;
        const double g = profile.value(s);
        const Eigen::MatrixXd f = (1.0 - g) * k_start + g * k_end;
        a.setZero(2 * n, 2 * n);
        a.topRightCorner(n, n).setIdentity();
        a.bottomLeftCorner(n, n) = -f;
        b.setZero(2 * n);
        b.tail(n) = (1.0 - g) * w_start;
    }

    double generator_scale() const {
        return std::max({spectral_norm(k_start), spectral_norm(k_end), 1.0});
    }
};

SwitchWindow make_window(const QuenchSchedule& schedule) {
    const Eigen::MatrixXd c_inv_sqrt = symmetric_inv_sqrt(schedule.capacitance);
    SwitchWindow w;
    w.k_start = c_inv_sqrt * schedule.plan.b_start * c_inv_sqrt;
    w.k_start = 0.5 * (w.k_start + w.k_start.transpose());
    w.k_end = c_inv_sqrt * schedule.plan.b_end * c_inv_sqrt;
    w.k_end = 0.5 * (w.k_end + w.k_end.transpose());
    w.w_start = c_inv_sqrt * schedule.plan.v_start;
    w.t_sw = schedule.t_sw;
    w.profile = schedule.profile;
    return w;
}

// One pass over [t0, t1] with a fixed number of substeps per piece.
// Pieces are cut at profile discontinuities so midpoint sampling never
// straddles a jump.
Propagator integrate_fixed(const SwitchWindow& window, double t0, double t1, int substeps) {
    const Eigen::Index dim = 2 * window.modes();
    Propagator prop{Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim)};

    std::vector<double> cuts{t0};
    for (double s : window.profile.breakpoints()) {
        const double t = s * window.t_sw;
        if (t > t0 && t < t1) cuts.push_back(t);
    }
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());

    const double total = t1 - t0;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::MatrixXd augmented(dim + 1, dim + 1);
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double lo = cuts[piece];
        const double hi = cuts[piece + 1];
        const int n_piece =
            std::max(1, static_cast<int>(std::lround(substeps * (hi - lo) / total)));
        const double dt = (hi - lo) / n_piece;
        for (int k = 0; k < n_piece; ++k) {
            const double mid = lo + (k + 0.5) * dt;
            window.generator(mid, a, b);
            augmented.setZero();
            augmented.topLeftCorner(dim, dim) = a * dt;
            augmented.topRightCorner(dim, 1) = b * dt;
            const Eigen::MatrixXd step = augmented.exp();
            const auto u_step = step.topLeftCorner(dim, dim);
            prop.matrix = u_step * prop.matrix;
            prop.inhomogeneous = u_step * prop.inhomogeneous + step.topRightCorner(dim, 1);
        }
    }
    return prop;
}

} // namespace

Propagator propagate(const QuenchSchedule& schedule, double t0, double t1) {
    validate(schedule);
    if (t0 < 0.0 || t1 > schedule.t_sw * (1.0 + 1e-12) || t1 < t0) {
        throw validation_error("propagate: interval must lie inside [0, t_sw]");
    }
    const Eigen::Index dim = 2 * schedule.plan.b_start.rows();
    if (t1 - t0 <= 0.0) {
        return Propagator{Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim)};
    }

    const SwitchWindow window = make_window(schedule);
    // ||A|| ~ max(||F||, 1); keep ||A|| dt below ~0.1 on the first pass.
    const double a_scale = std::sqrt(window.generator_scale());
    int substeps = std::max<int>(schedule.control.min_substeps,
                                 static_cast<int>(std::ceil(10.0 * (t1 - t0) * a_scale)));

    Propagator coarse = integrate_fixed(window, t0, t1, substeps);
    for (int round = 0; round < schedule.control.max_doublings; ++round) {
        substeps *= 2;
        Propagator fine = integrate_fixed(window, t0, t1, substeps);
        const double defect = (fine.matrix - coarse.matrix).norm() +
                              (fine.inhomogeneous - coarse.inhomogeneous).norm();
        const double scale = std::max(1.0, fine.matrix.norm());
        if (defect <= schedule.control.tolerance * scale) {
            return fine;
        }
        coarse = std::move(fine);
    }
    std::ostringstream msg;
    msg << "propagate: step-doubling defect did not reach " << schedule.control.tolerance
        << " within " << schedule.control.max_doublings << " refinements";
    throw numerical_error(msg.str());
}

Propagator propagate(const QuenchSchedule& schedule) {
    return propagate(schedule, 0.0, schedule.t_sw);
}

GaussianState evolve_state(const GaussianState& state, const Propagator& propagator) {
    if (state.mean.size() != propagator.matrix.rows()) {
        throw validation_error("evolve_state: state and propagator dimensions disagree");
    }
    GaussianState out;
    out.mean = propagator.matrix * state.mean + propagator.inhomogeneous;
    out.second_moments = propagator.matrix * state.second_moments * propagator.matrix.transpose();
    out.second_moments = 0.5 * (out.second_moments + out.second_moments.transpose());
    return out;
}

double plan_omega_max(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance) {
    const Eigen::MatrixXd c_inv_sqrt = symmetric_inv_sqrt(capacitance);
    auto top_frequency = [&](const Eigen::MatrixXd& b) {
        const Eigen::MatrixXd k = c_inv_sqrt * b * c_inv_sqrt;
        const SymmetricEig eig = eig_sym(0.5 * (k + k.transpose()));
        return std::sqrt(std::max(0.0, eig.values.maxCoeff()));
    };
    return std::max(top_frequency(plan.b_start), top_frequency(plan.b_end));
}

double diabatic_bound(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance,
                      double epsilon) {
    if (!(epsilon > 0.0)) throw validation_error("diabatic_bound: epsilon must be positive");
    validate(plan);
    const double omega_max = plan_omega_max(plan, capacitance);
    const double drive_norm = (symmetric_inv_sqrt(capacitance) * plan.v_start).norm();
    double budget = omega_max > 0.0 ? 1.0 / omega_max : std::numeric_limits<double>::infinity();
    if (drive_norm > 0.0) budget = std::min(budget, 2.0 / drive_norm);
    return epsilon * budget;
}

double nonlinear_bound_advisory(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance,
                                double c3, double c4) {
    validate(plan);
    const double drive_norm = (symmetric_inv_sqrt(capacitance) * plan.v_start).norm();
    double bound = std::numeric_limits<double>::infinity();
    if (c3 != 0.0 && drive_norm > 0.0) {
        bound = std::min(bound, 1.0 / (std::abs(c3) * std::pow(drive_norm, 1.5)));
    }
    if (c4 != 0.0 && drive_norm > 0.0) {
        bound = std::min(bound, 1.0 / (std::abs(c4) * drive_norm * drive_norm));
    }
    return bound;
}

DiabaticityReport diabaticity_report(const QuenchSchedule& schedule) {
    const Propagator prop = propagate(schedule);
    const Eigen::Index dim = prop.matrix.rows();
    DiabaticityReport report;
    report.norm_deviation =
        spectral_norm(prop.matrix - Eigen::MatrixXd::Identity(dim, dim));
    report.drive_deviation = prop.inhomogeneous.norm();
    const double omega_max = plan_omega_max(schedule.plan, schedule.capacitance);
    report.magnus_converged = schedule.t_sw * omega_max < 1.0;
    report.t_bound = diabatic_bound(schedule.plan, schedule.capacitance, 1.0);
    return report;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < count; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

SweepResult error_scaling_sweep(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance,
                                const std::vector<double>& t_sw_grid, int threads) {
    validate(plan);
    if (t_sw_grid.empty()) throw validation_error("error_scaling_sweep: empty grid");
    for (double t : t_sw_grid) {
        if (!(t > 0.0)) throw validation_error("error_scaling_sweep: grid values must be positive");
    }
    const double omega_max = plan_omega_max(plan, capacitance);
    int converged = 0;
    for (double t : t_sw_grid) {
        if (t * omega_max < 1.0) ++converged;
    }
    if (converged < 3) {
        throw validation_error(
            "error_scaling_sweep: need at least 3 grid points with t_sw * omega_max < 1");
    }

    SweepResult result;
    result.rows.resize(t_sw_grid.size());
    result.converged_points = converged;

    parallel_for(static_cast<int>(t_sw_grid.size()), threads, [&](int idx) {
        const double t_sw = t_sw_grid[static_cast<std::size_t>(idx)];
        QuenchSchedule schedule{plan, capacitance, t_sw, SwitchProfile{}, IntegratorControl{}};
        const Propagator prop = propagate(schedule);
        const Eigen::Index dim = prop.matrix.rows();
        Eigen::VectorXd diffs(dim);
        for (Eigen::Index c = 0; c < dim; ++c) {
            Eigen::VectorXd delta = prop.matrix.col(c) + prop.inhomogeneous;
            delta(c) -= 1.0;
            diffs(c) = delta.norm();
        }
        const double mean = diffs.mean();
        const double variance = (diffs.array() - mean).square().mean();
        result.rows[static_cast<std::size_t>(idx)] =
            SweepRow{t_sw, t_sw * omega_max, mean, variance};
    });

    // Log-log least squares over the magnus-converged rows.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n_fit = 0;
    for (const SweepRow& row : result.rows) {
        if (row.t_sw_omega_max < 1.0 && row.mean_norm_diff > 0.0) {
            const double x = std::log(row.t_sw);
            const double y = std::log(row.mean_norm_diff);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n_fit;
        }
    }
    if (n_fit >= 2) {
        const double denom = n_fit * sxx - sx * sx;
        result.slope = denom != 0.0 ? (n_fit * sxy - sx * sy) / denom : 0.0;
    }
    return result;
}

} // namespace fcemu
