#include "fcemu/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "fcemu/errors.hpp"
#include "fcemu/linalg.hpp"

namespace fcemu {

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1) throw validation_error("gauss_hermite: order must be at least 1");
    // Golub-Welsch for weight exp(-x^2): zero diagonal, off-diagonal sqrt(k/2).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
    for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("gauss_hermite: tridiagonal eigensolve failed");
    }
    GaussHermiteRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights = std::sqrt(std::numbers::pi) *
                   solver.eigenvectors().row(0).transpose().array().square().matrix();
    return rule;
}

OverlapProblem overlap_problem(const ForceField& initial, const ForceField& final_ff) {
    validate(initial);
    validate(final_ff);
    if (initial.masses.size() != final_ff.masses.size()) {
        throw validation_error("overlap_problem: configurations must share dimension");
    }
    if ((initial.masses - final_ff.masses).norm() > 1e-12 * initial.masses.norm()) {
        throw validation_error("overlap_problem: configurations must share masses");
    }
    OverlapProblem problem;
    problem.stiffness_initial = mass_weighted_hessian(initial);
    problem.stiffness_final = mass_weighted_hessian(final_ff);
    const Eigen::VectorXd sqrt_m = initial.masses.array().sqrt().matrix();
    problem.displacement =
        sqrt_m.asDiagonal() * (initial.equilibrium - final_ff.equilibrium);
    return problem;
}

OverlapProblem overlap_problem(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance) {
    validate(plan);
    const Eigen::MatrixXd c_inv_sqrt = symmetric_inv_sqrt(capacitance);
    OverlapProblem problem;
    problem.stiffness_initial = c_inv_sqrt * plan.b_start * c_inv_sqrt;
    problem.stiffness_initial =
        0.5 * (problem.stiffness_initial + problem.stiffness_initial.transpose());
    problem.stiffness_final = c_inv_sqrt * plan.b_end * c_inv_sqrt;
    problem.stiffness_final =
        0.5 * (problem.stiffness_final + problem.stiffness_final.transpose());
    problem.displacement =
        problem.stiffness_initial.ldlt().solve(c_inv_sqrt * plan.v_start);
    return problem;
}

namespace {

constexpr int max_quadrature_order = 256;
constexpr std::int64_t max_grid_points = std::int64_t{1} << 24;

int automatic_order(Eigen::Index n_modes) {
    switch (n_modes) {
        case 1: return 64;
        case 2: return 48;
        case 3: return 32;
        default: return 24;
    }
}

struct OverlapGeometry {
    Eigen::VectorXd omega_final;   // final mode frequencies, ascending
    Eigen::MatrixXd w_mixed;       // O_f^T sqrt(K_i) O_f
    Eigen::VectorXd delta;         // displacement in final mode coordinates
    double log_norm = 0.0;         // log of the initial ground-state prefactor
    Eigen::VectorXd center;        // per-dimension quadrature centers
    Eigen::VectorXd envelope;      // per-dimension Gaussian envelope scales
};

OverlapGeometry build_geometry(const OverlapProblem& problem) {
    const Eigen::Index n = problem.stiffness_final.rows();
    const SymmetricEig ef = eig_sym(problem.stiffness_final);
    const SymmetricEig ei = eig_sym(problem.stiffness_initial);
    const double top = std::max(ef.values.maxCoeff(), ei.values.maxCoeff());
    if (ef.values.minCoeff() <= kernel_rel_threshold * top ||
        ei.values.minCoeff() <= kernel_rel_threshold * top) {
        throw validation_error(
            "franck_condon_profile: configurations must be null-space-free");
    }

    OverlapGeometry geo;
    geo.omega_final = ef.values.cwiseSqrt();
    const Eigen::VectorXd omega_initial = ei.values.cwiseSqrt();
    const Eigen::MatrixXd sqrt_ki =
        ei.vectors * omega_initial.asDiagonal() * ei.vectors.transpose();
    geo.w_mixed = ef.vectors.transpose() * sqrt_ki * ef.vectors;
    geo.w_mixed = 0.5 * (geo.w_mixed + geo.w_mixed.transpose());
    geo.delta = ef.vectors.transpose() * problem.displacement;
    geo.log_norm = 0.25 * omega_initial.array().log().sum() -
                   0.25 * static_cast<double>(n) * std::log(std::numbers::pi);

    const Eigen::MatrixXd total =
        geo.w_mixed + Eigen::MatrixXd(geo.omega_final.asDiagonal());
    const Eigen::MatrixXd total_inv = total.inverse();
    geo.center = total_inv * (geo.w_mixed * geo.delta);
    geo.envelope.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) geo.envelope(j) = 0.5 / total_inv(j, j);
    return geo;
}

void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& chunk_body) {
    threads = std::max(1, threads);
    if (threads == 1 || count < 1024) {
        chunk_body(0, count);
        return;
    }
    const std::int64_t chunk = (count + threads - 1) / threads;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() { chunk_body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

// Amplitudes <n|Psi_0> for every occupation vector with n_j <= n_max,
// flattened row-major (first mode slowest).
Eigen::VectorXd amplitudes(const OverlapGeometry& geo, int n_max, int order, int threads) {
    const Eigen::Index n = geo.omega_final.size();
    const int states = n_max + 1;
    const GaussHermiteRule rule = gauss_hermite(order);

    // Scaled nodes and weights for integrating plain functions per dimension.
    Eigen::MatrixXd nodes(n, order);
    Eigen::MatrixXd fweights(n, order);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double root_a = std::sqrt(geo.envelope(j));
        for (int k = 0; k < order; ++k) {
            const double x = rule.nodes(k);
            nodes(j, k) = geo.center(j) + x / root_a;
            fweights(j, k) = std::exp(std::log(rule.weights(k)) + x * x) / root_a;
        }
    }

    // Hermite-function tables: chi[j](row n, col k) at the scaled nodes.
    std::vector<Eigen::MatrixXd> chi(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const double omega = geo.omega_final(j);
        Eigen::MatrixXd table(states, order);
        for (int k = 0; k < order; ++k) {
            const double xi = std::sqrt(omega) * nodes(j, k);
            double hm1 = 0.0;
            double h = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
            table(0, k) = h;
            for (int m = 1; m < states; ++m) {
                const double hp =
                    std::sqrt(2.0 / m) * xi * h - std::sqrt((m - 1.0) / m) * hm1;
                hm1 = h;
                h = hp;
                table(m, k) = h;
            }
        }
        chi[static_cast<std::size_t>(j)] = std::pow(omega, 0.25) * table;
    }

    // Ground-state values times the quadrature weights on the product grid.
    std::int64_t grid_size = 1;
    for (Eigen::Index j = 0; j < n; ++j) grid_size *= order;
    Eigen::VectorXd current(grid_size);
    parallel_for(grid_size, threads, [&](std::int64_t lo, std::int64_t hi) {
        Eigen::VectorXd u(n);
        std::array<int, 8> k{};
        for (std::int64_t flat = lo; flat < hi; ++flat) {
            std::int64_t rem = flat;
            for (Eigen::Index j = n - 1; j >= 0; --j) {
                k[static_cast<std::size_t>(j)] = static_cast<int>(rem % order);
                rem /= order;
            }
            double log_weight = geo.log_norm;
            for (Eigen::Index j = 0; j < n; ++j) {
                u(j) = nodes(j, k[static_cast<std::size_t>(j)]);
                log_weight += std::log(fweights(j, k[static_cast<std::size_t>(j)]));
            }
            const Eigen::VectorXd v = u - geo.delta;
            const double quad = v.dot(geo.w_mixed * v);
            current(flat) = std::exp(log_weight - 0.5 * quad);
        }
    });

    // Contract one grid axis at a time against the Hermite tables.
    std::int64_t grid_rest = grid_size;
    std::int64_t state_block = 1;
    for (Eigen::Index j = 0; j < n; ++j) {
        grid_rest /= order;
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>
            in(current.data(), order, grid_rest * state_block);
        const Eigen::MatrixXd out = chi[static_cast<std::size_t>(j)] * in;
        Eigen::VectorXd next(grid_rest * state_block * states);
        for (std::int64_t g = 0; g < grid_rest; ++g) {
            for (std::int64_t s = 0; s < state_block; ++s) {
                for (int m = 0; m < states; ++m) {
                    next(g * state_block * states + s * states + m) =
                        out(m, g * state_block + s);
                }
            }
        }
        current = std::move(next);
        state_block *= states;
    }
    return current;
}

std::vector<int> occupation_of(std::int64_t flat, Eigen::Index n, int states) {
    std::vector<int> occ(static_cast<std::size_t>(n));
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        occ[static_cast<std::size_t>(j)] = static_cast<int>(flat % states);
        flat /= states;
    }
    return occ;
}

} // namespace

LineSpectrum franck_condon_profile(const OverlapProblem& problem, const FcpOptions& options) {
    const Eigen::Index n = problem.stiffness_final.rows();
    if (n == 0 || problem.stiffness_final.cols() != n ||
        problem.stiffness_initial.rows() != n || problem.stiffness_initial.cols() != n ||
        problem.displacement.size() != n) {
        throw validation_error("franck_condon_profile: dimension mismatch");
    }
    if (n > 4) {
        throw validation_error(
            "franck_condon_profile: limited to 4 modes (exact overlap integrals)");
    }
    if (options.n_max < 1) {
        throw validation_error("franck_condon_profile: n_max must be at least 1");
    }
    int order = options.quadrature_order > 0 ? options.quadrature_order : automatic_order(n);
    order = std::max(order, 2 * (options.n_max + 1));
    if (2 * order > max_quadrature_order) {
        throw validation_error("franck_condon_profile: quadrature order too large");
    }
    std::int64_t doubled_grid = 1;
    for (Eigen::Index j = 0; j < n; ++j) doubled_grid *= 2 * order;
    if (doubled_grid > max_grid_points) {
        throw validation_error("franck_condon_profile: quadrature grid exceeds memory guard");
    }

    const OverlapGeometry geo = build_geometry(problem);
    const Eigen::VectorXd amp_coarse = amplitudes(geo, options.n_max, order, options.threads);
    const Eigen::VectorXd amp_fine = amplitudes(geo, options.n_max, 2 * order, options.threads);

    const Eigen::VectorXd p_coarse = amp_coarse.array().square();
    const Eigen::VectorXd p_fine = amp_fine.array().square();
    const double drift = (p_fine - p_coarse).cwiseAbs().maxCoeff();
    if (drift > 1e-8) {
        std::ostringstream msg;
        msg << "franck_condon_profile: quadrature not converged (doubling the order moved a "
               "probability by "
            << drift << ")";
        throw convergence_error(msg.str());
    }

    const int states = options.n_max + 1;

    // Regulator modes must stay unpopulated.
    std::vector<Eigen::Index> regulator_modes;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (double lambda : options.regulator_frequencies) {
            if (std::abs(geo.omega_final(j) - lambda) <= options.regulator_match_tol * lambda) {
                regulator_modes.push_back(j);
                break;
            }
        }
    }
    if (!regulator_modes.empty()) {
        double regulator_mass = 0.0;
        for (std::int64_t flat = 0; flat < p_fine.size(); ++flat) {
            const std::vector<int> occ = occupation_of(flat, n, states);
            for (Eigen::Index j : regulator_modes) {
                if (occ[static_cast<std::size_t>(j)] > 0) {
                    regulator_mass += p_fine(flat);
                    break;
                }
            }
        }
        if (regulator_mass >= 1e-10) {
            std::ostringstream msg;
            msg << "franck_condon_profile: regulator modes acquired occupation mass "
                << regulator_mass << "; initial and final regulators do not match";
            throw numerical_error(msg.str());
        }
    }

    struct RawLine {
        double energy;
        double probability;
        std::vector<int> occupation;
    };
    std::vector<RawLine> raw;
    raw.reserve(static_cast<std::size_t>(p_fine.size()));
    double population = 0.0;
    for (std::int64_t flat = 0; flat < p_fine.size(); ++flat) {
        const double p = p_fine(flat);
        if (p < 1e-14) continue;
        const std::vector<int> occ = occupation_of(flat, n, states);
        double energy = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            energy += geo.omega_final(j) * occ[static_cast<std::size_t>(j)];
        }
        raw.push_back({energy, p, occ});
        population += p;
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawLine& a, const RawLine& b) { return a.energy < b.energy; });

    LineSpectrum spectrum;
    spectrum.zero_point = 0.5 * geo.omega_final.sum();
    spectrum.truncation_tail = std::max(0.0, 1.0 - population);
    for (RawLine& line : raw) {
        const bool merge =
            !spectrum.lines.empty() &&
            line.energy - spectrum.lines.back().energy <=
                1e-9 * std::max({line.energy, spectrum.lines.back().energy, 0.0});
        if (merge) {
            spectrum.lines.back().probability += line.probability;
            spectrum.lines.back().occupations.push_back(std::move(line.occupation));
        } else {
            spectrum.lines.push_back(
                {line.energy, line.probability, {std::move(line.occupation)}});
        }
    }
    return spectrum;
}

LineSpectrum franck_condon_profile(const ForceField& initial, const ForceField& final_ff,
                                   int n_max, int quadrature_order) {
    FcpOptions options;
    options.n_max = n_max;
    options.quadrature_order = quadrature_order;
    return franck_condon_profile(overlap_problem(initial, final_ff), options);
}

MomentReport moment_check(const LineSpectrum& spectrum, const GaussianState& initial_state,
                          const EmulatorModel& final_model) {
    if (initial_state.mean.size() != 2 * final_model.capacitance.rows()) {
        throw validation_error("moment_check: state and model dimensions disagree");
    }
    MomentReport report;
    double e_max = 0.0;
    for (const SpectralLine& line : spectrum.lines) {
        report.spectrum_mean += line.probability * line.energy;
        e_max = std::max(e_max, line.energy);
    }
    report.model_mean = mean_energy(initial_state, final_model) - spectrum.zero_point;
    report.abs_discrepancy = std::abs(report.spectrum_mean - report.model_mean);
    report.rel_discrepancy =
        report.abs_discrepancy / std::max(std::abs(report.model_mean), 1e-300);
    report.tolerance = std::max(1e-6, 3.0 * spectrum.truncation_tail * e_max);
    report.pass = report.abs_discrepancy < report.tolerance;
    return report;
}

Histogram binned_profile(const LineSpectrum& spectrum, double bin_width) {
    if (!(bin_width > 0.0)) throw validation_error("binned_profile: bin width must be positive");
    Histogram histogram;
    histogram.bin_width = bin_width;
    for (const SpectralLine& line : spectrum.lines) {
        const auto bin = static_cast<std::size_t>(std::floor(line.energy / bin_width));
        if (histogram.mass.size() <= bin) histogram.mass.resize(bin + 1, 0.0);
        histogram.mass[bin] += line.probability;
    }
    return histogram;
}

} // namespace fcemu
