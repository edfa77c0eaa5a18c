#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fcemu/force_field.hpp"
#include "fcemu/protocol.hpp"
#include "fcemu/quench.hpp"
#include "fcemu/spectrum.hpp"

namespace fcemu {

// Shortest round-trip decimal representation; used for every float the CLI
// writes so identical inputs produce byte-identical outputs.
std::string format_double(double value);

// --- molecule files ----------------------------------------------------------

struct MoleculeFile {
    std::string name;
    std::vector<double> masses_amu;
    std::vector<std::vector<double>> hessian_initial_ev_per_a2;
    std::vector<std::vector<double>> hessian_final_ev_per_a2;
    std::vector<double> equilibrium_initial_angstrom;
    std::vector<double> equilibrium_final_angstrom;
    std::vector<std::string> mode_labels; // optional
};

MoleculeFile load_molecule(const std::string& path);
void save_molecule(const std::string& path, const MoleculeFile& molecule);

// Unit conversion to the internal system (validates the force fields).
std::pair<ForceField, ForceField> to_internal(const MoleculeFile& molecule);
MoleculeFile from_internal(const ForceField& initial, const ForceField& final_ff,
                           const std::string& name);

// --- run configuration -------------------------------------------------------

struct RunConfig {
    // hardware window, laboratory units
    double omega_min_ghz = 0.2;
    double omega_max_ghz = 10.0;
    double t_cryo_mk = 20.0;
    double b_max_inv_nh = 4.0;
    // capacitance rule: C = c0 * M / m0
    double c0_pf = 0.5;
    double m0_amu = 1.0;
    std::string kappa_strategy = "frequency-cap";
    double t_molecule_k = 300.0;
    std::vector<double> lambda_regulators_mev;
    int protocol = 1;
    double epsilon = 0.01;
    double t_sw = 0.0; // explicit switch time (internal units); 0 defers to epsilon
    // quench diagnostic grid: log-spaced in t_sw * omega_max
    double sweep_omega_t_min = 1e-3;
    double sweep_omega_t_max = 1e-1;
    int sweep_points = 12;
    // spectrum
    int fcp_n_max = 10;
    int fcp_quadrature_order = 0; // 0 = automatic
    // GHZ metrology
    double ghz_chi = 0.05;
    double ghz_tau_max = 0.0; // required by forward/reconstruct
    int ghz_tau_samples = 4096;
    double ghz_energy_max = 0.0;
    int ghz_energy_samples = 1024;
    std::string ghz_window = "hann";
    // SQUID design targets
    double squid_target_c3_over_c2 = 0.0;
    double squid_target_c4_over_c2 = 0.0;
    double squid_phi0 = 1.0;
    double squid_l = 1.0;

    std::string out_dir = "out";
};

RunConfig load_config(const std::string& path);
void validate(const RunConfig& config);

HardwareConstraints hardware_from(const RunConfig& config);
units::CircuitCalibration calibration_from(const RunConfig& config);
KappaStrategy strategy_from(const RunConfig& config, const Eigen::MatrixXd& capacitance);
Eigen::MatrixXd default_capacitance(const RunConfig& config, const ForceField& ff);

// --- plan files ---------------------------------------------------------------

struct PlanFile {
    ProtocolPlan plan;
    Eigen::MatrixXd capacitance;
};

void save_plan(const std::string& path, const ProtocolPlan& plan,
               const Eigen::MatrixXd& capacitance);
PlanFile load_plan(const std::string& path);

// --- CSV ----------------------------------------------------------------------

std::string circuit_table_csv(const CircuitTable& table);
std::string sweep_csv(const SweepResult& sweep);
std::string spectrum_csv(const LineSpectrum& spectrum);
LineSpectrum parse_spectrum_csv(const std::string& text);
std::string xy_csv(const std::string& x_name, const std::string& y_name,
                   const std::vector<double>& x, const std::vector<double>& y);
std::pair<std::vector<double>, std::vector<double>> parse_xy_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace fcemu
