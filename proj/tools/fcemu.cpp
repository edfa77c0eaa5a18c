// Command-line driver: compiles molecular force fields into emulator
// parameters, runs quench diagnostics, computes Franck-Condon profiles and
// drives the SQUID-design / GHZ-readout helpers.
//
// Exit codes: 0 ok, 2 validation error, 3 numerical error, 4 convergence error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcemu/anharmonic.hpp"
#include "fcemu/errors.hpp"
#include "fcemu/io.hpp"
#include "fcemu/linalg.hpp"
#include "fcemu/quench.hpp"
#include "fcemu/readout.hpp"
#include "fcemu/spectrum.hpp"
#include "fcemu/units.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir; // overrides the config when set
    int threads = 1;
    long seed = 0; // reserved
};

std::string out_path(const fcemu::RunConfig& config, const GlobalOptions& global,
                     const std::string& file) {
    const std::string dir = global.out_dir.empty() ? config.out_dir : global.out_dir;
    return (std::filesystem::path(dir) / file).string();
}

std::vector<double> internal_regulators(const fcemu::RunConfig& config) {
    std::vector<double> lambdas;
    lambdas.reserve(config.lambda_regulators_mev.size());
    for (double mev : config.lambda_regulators_mev) {
        lambdas.push_back(fcemu::units::mev_to_internal(mev));
    }
    return lambdas;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& warning : warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
}

std::pair<fcemu::ForceField, fcemu::ForceField> load_prepared_fields(
    const std::string& molecule_path, const fcemu::RunConfig& config,
    std::vector<std::string>& warnings) {
    const fcemu::MoleculeFile mf = fcemu::load_molecule(molecule_path);
    auto [ff0, fff] = fcemu::to_internal(mf);
    const std::vector<double> lambdas = internal_regulators(config);
    ff0 = fcemu::remove_null_space(ff0, lambdas, &warnings);
    fff = fcemu::remove_null_space(fff, lambdas, &warnings);
    return {ff0, fff};
}

int cmd_compile(const std::string& molecule_path, const fcemu::RunConfig& config,
                const GlobalOptions& global) {
    std::vector<std::string> warnings;
    auto [ff0, fff] = load_prepared_fields(molecule_path, config, warnings);

    const fcemu::HardwareConstraints hw = fcemu::hardware_from(config);
    const Eigen::MatrixXd capacitance = fcemu::default_capacitance(config, ff0);
    const fcemu::KappaStrategy strategy = fcemu::strategy_from(config, capacitance);

    fcemu::ProtocolPlan plan;
    if (config.protocol == 1) {
        plan = fcemu::plan_protocol1(ff0, fff, hw, capacitance, strategy);
    } else {
        plan = fcemu::plan_protocol2(ff0, fff, hw, capacitance, strategy, &warnings);
    }
    print_warnings(warnings);

    const fcemu::EmulatorModel start = fcemu::start_model(plan, capacitance);
    const fcemu::EmulatorModel end = fcemu::end_model(plan, capacitance);
    const fcemu::CircuitTable table =
        fcemu::circuit_table(start, end, fcemu::calibration_from(config));

    const std::string table_path = out_path(config, global, "circuit_table.csv");
    const std::string plan_path = out_path(config, global, "plan.json");
    fcemu::write_text_file(table_path, fcemu::circuit_table_csv(table));
    fcemu::save_plan(plan_path, plan, capacitance);
    std::cout << "kappa=" << fcemu::format_double(plan.kappa) << "\n";
    std::cout << "wrote " << table_path << "\n";
    std::cout << "wrote " << plan_path << "\n";
    return 0;
}

int cmd_quench(const std::string& plan_path, const fcemu::RunConfig& config,
               const GlobalOptions& global) {
    const fcemu::PlanFile file = fcemu::load_plan(plan_path);
    const double omega_max = fcemu::plan_omega_max(file.plan, file.capacitance);
    if (!(omega_max > 0.0)) {
        throw fcemu::validation_error("quench: plan has no positive frequencies");
    }

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(config.sweep_points));
    const double log_lo = std::log(config.sweep_omega_t_min);
    const double log_hi = std::log(config.sweep_omega_t_max);
    for (int i = 0; i < config.sweep_points; ++i) {
        const double s = config.sweep_points == 1
                             ? 0.0
                             : static_cast<double>(i) / (config.sweep_points - 1);
        grid.push_back(std::exp(log_lo + s * (log_hi - log_lo)) / omega_max);
    }

    const fcemu::SweepResult sweep =
        fcemu::error_scaling_sweep(file.plan, file.capacitance, grid, global.threads);

    const std::string csv_path = out_path(config, global, "quench_sweep.csv");
    fcemu::write_text_file(csv_path, fcemu::sweep_csv(sweep));

    json summary;
    summary["schema_version"] = 1;
    summary["slope"] = sweep.slope;
    summary["converged_points"] = sweep.converged_points;
    summary["omega_max"] = omega_max;
    summary["diabatic_bound_epsilon"] = config.epsilon;
    summary["diabatic_bound_t_sw"] =
        fcemu::diabatic_bound(file.plan, file.capacitance, config.epsilon);
    const std::string summary_path = out_path(config, global, "quench_summary.json");
    fcemu::write_text_file(summary_path, summary.dump(2) + "\n");

    std::cout << "slope=" << fcemu::format_double(sweep.slope) << "\n";
    std::cout << "wrote " << csv_path << "\n";
    std::cout << "wrote " << summary_path << "\n";
    return 0;
}

int cmd_fcp(const std::string& molecule_path, const fcemu::RunConfig& config,
            const GlobalOptions& global) {
    std::vector<std::string> warnings;
    auto [ff0, fff] = load_prepared_fields(molecule_path, config, warnings);
    print_warnings(warnings);

    fcemu::FcpOptions options;
    options.n_max = config.fcp_n_max;
    options.quadrature_order = config.fcp_quadrature_order;
    options.regulator_frequencies = internal_regulators(config);
    options.threads = global.threads;

    const fcemu::OverlapProblem problem = fcemu::overlap_problem(ff0, fff);
    const fcemu::LineSpectrum spectrum = fcemu::franck_condon_profile(problem, options);

    const Eigen::Index n = problem.stiffness_final.rows();
    fcemu::EmulatorModel final_model{Eigen::MatrixXd::Identity(n, n), problem.stiffness_final,
                                     Eigen::VectorXd::Zero(n), 1.0};
    fcemu::EmulatorModel initial_model{Eigen::MatrixXd::Identity(n, n),
                                       problem.stiffness_initial,
                                       problem.stiffness_initial * problem.displacement, 1.0};
    const fcemu::GaussianState initial_state = fcemu::ground_state(initial_model);
    const fcemu::MomentReport report =
        fcemu::moment_check(spectrum, initial_state, final_model);

    const std::string spectrum_path = out_path(config, global, "spectrum.csv");
    fcemu::write_text_file(spectrum_path, fcemu::spectrum_csv(spectrum));

    json moment;
    moment["schema_version"] = 1;
    moment["spectrum_mean"] = report.spectrum_mean;
    moment["model_mean"] = report.model_mean;
    moment["abs_discrepancy"] = report.abs_discrepancy;
    moment["rel_discrepancy"] = report.rel_discrepancy;
    moment["tolerance"] = report.tolerance;
    moment["pass"] = report.pass;
    const std::string moment_path = out_path(config, global, "moment_report.json");
    fcemu::write_text_file(moment_path, moment.dump(2) + "\n");

    std::cout << "lines=" << spectrum.lines.size()
              << " tail=" << fcemu::format_double(spectrum.truncation_tail) << "\n";
    std::cout << "wrote " << spectrum_path << "\n";
    std::cout << "wrote " << moment_path << "\n";
    if (!report.pass) {
        std::cerr << "error: moment check failed (discrepancy "
                  << fcemu::format_double(report.abs_discrepancy) << " over tolerance "
                  << fcemu::format_double(report.tolerance) << ")\n";
        return 3;
    }
    return 0;
}

int cmd_squid_design(const fcemu::RunConfig& config, const GlobalOptions& global) {
    const fcemu::SquidCircuit circuit =
        fcemu::design_anharmonicity(config.squid_target_c3_over_c2,
                                    config.squid_target_c4_over_c2, config.squid_phi0,
                                    config.squid_l);
    const fcemu::TaylorExpansion expansion = fcemu::taylor_coefficients(circuit);

    json design;
    design["schema_version"] = 1;
    design["ej"] = circuit.ej;
    design["l"] = circuit.l;
    design["phi_ext"] = circuit.phi_ext;
    design["phi0"] = circuit.phi0;
    design["lj"] = std::isfinite(circuit.lj) ? json(circuit.lj) : json(nullptr);
    design["phi_min"] = expansion.phi_min;
    const double achieved3 = expansion.c3 / expansion.c2;
    const double achieved4 = expansion.c4 / expansion.c2;
    design["achieved_c3_over_c2"] = achieved3;
    design["achieved_c4_over_c2"] = achieved4;
    design["residual_c3_over_c2"] = achieved3 - config.squid_target_c3_over_c2;
    design["residual_c4_over_c2"] = achieved4 - config.squid_target_c4_over_c2;

    const std::string design_path = out_path(config, global, "design.json");
    fcemu::write_text_file(design_path, design.dump(2) + "\n");
    std::cout << "wrote " << design_path << "\n";
    return 0;
}

fcemu::GhzSetup ghz_setup_from(const fcemu::RunConfig& config) {
    if (!(config.ghz_tau_max > 0.0) || !(config.ghz_energy_max > 0.0)) {
        throw fcemu::validation_error("ghz: config must set tau_max and energy_max");
    }
    fcemu::GhzSetup setup;
    setup.chi = config.ghz_chi;
    setup.window = config.ghz_window == "rectangular" ? fcemu::GhzSetup::Window::rectangular
                                                      : fcemu::GhzSetup::Window::hann;
    setup.tau_grid.resize(static_cast<std::size_t>(config.ghz_tau_samples));
    for (int i = 0; i < config.ghz_tau_samples; ++i) {
        setup.tau_grid[static_cast<std::size_t>(i)] =
            config.ghz_tau_max * i / (config.ghz_tau_samples - 1);
    }
    setup.energy_grid.resize(static_cast<std::size_t>(config.ghz_energy_samples));
    for (int i = 0; i < config.ghz_energy_samples; ++i) {
        setup.energy_grid[static_cast<std::size_t>(i)] =
            config.ghz_energy_max * i / (config.ghz_energy_samples - 1);
    }
    return setup;
}

int cmd_forward(const std::string& spectrum_path, const fcemu::RunConfig& config,
                const GlobalOptions& global) {
    const fcemu::LineSpectrum spectrum =
        fcemu::parse_spectrum_csv(fcemu::read_text_file(spectrum_path));
    const fcemu::GhzSetup setup = ghz_setup_from(config);
    const std::vector<double> p1 = fcemu::ghz_forward(spectrum, setup);
    const std::string p1_path = out_path(config, global, "p1.csv");
    fcemu::write_text_file(p1_path, fcemu::xy_csv("tau", "p1", setup.tau_grid, p1));
    std::cout << "wrote " << p1_path << "\n";
    return 0;
}

int cmd_reconstruct(const std::string& p1_path, const fcemu::RunConfig& config,
                    const GlobalOptions& global) {
    const auto [taus, p1] = fcemu::parse_xy_csv(fcemu::read_text_file(p1_path));
    fcemu::GhzSetup setup = ghz_setup_from(config);
    setup.tau_grid = taus;
    const std::vector<double> density = fcemu::ghz_reconstruct(p1, setup);
    const std::string out = out_path(config, global, "reconstruction.csv");
    fcemu::write_text_file(out, fcemu::xy_csv("energy", "density", setup.energy_grid, density));
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"molecular force-field quench emulation toolkit"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "run configuration JSON")->required();
    app.add_option("--out", global.out_dir, "output directory (overrides the config)");
    app.add_option("--threads", global.threads, "worker threads for sweeps")
        ->check(CLI::Range(1, 256));
    app.add_option("--seed", global.seed, "reserved");

    std::string molecule_path, plan_path, spectrum_path, p1_path;

    CLI::App* compile = app.add_subcommand("compile", "molecule -> circuit table + plan");
    compile->add_option("molecule", molecule_path, "molecule JSON")->required();

    CLI::App* quench = app.add_subcommand("quench", "plan -> switching diagnostics");
    quench->add_option("plan", plan_path, "plan JSON")->required();

    CLI::App* fcp = app.add_subcommand("fcp", "molecule -> Franck-Condon profile");
    fcp->add_option("molecule", molecule_path, "molecule JSON")->required();

    app.add_subcommand("squid-design", "anharmonicity targets -> circuit design");

    CLI::App* forward = app.add_subcommand("forward", "spectrum -> GHZ excitation probability");
    forward->add_option("spectrum", spectrum_path, "spectrum CSV")->required();

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "P1 trace -> spectral density");
    reconstruct->add_option("p1", p1_path, "P1 CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);
        app.exit(err);
        return 2;
    }

    try {
        const fcemu::RunConfig config = fcemu::load_config(global.config_path);
        if (app.got_subcommand("compile")) return cmd_compile(molecule_path, config, global);
        if (app.got_subcommand("quench")) return cmd_quench(plan_path, config, global);
        if (app.got_subcommand("fcp")) return cmd_fcp(molecule_path, config, global);
        if (app.got_subcommand("squid-design")) return cmd_squid_design(config, global);
        if (app.got_subcommand("forward")) return cmd_forward(spectrum_path, config, global);
        if (app.got_subcommand("reconstruct")) return cmd_reconstruct(p1_path, config, global);
    } catch (const fcemu::validation_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const fcemu::numerical_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const fcemu::convergence_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 4;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 0;
}
