#include "fcemu/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fcemu/errors.hpp"
#include "fcemu/units.hpp"

namespace fcemu {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("cannot write file: " + path);
    out << content;
}

namespace {

json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& err) {
        throw validation_error("malformed JSON in " + path + ": " + err.what());
    }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw validation_error(what + ": expected a matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw validation_error(what + ": ragged matrix");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw validation_error(what + ": expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

void require_schema(const json& j, const std::string& path) {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
        throw validation_error(path + ": unsupported or missing schema_version (expected 1)");
    }
}

} // namespace

// --- molecule files ----------------------------------------------------------

MoleculeFile load_molecule(const std::string& path) {
    const json j = parse_json_file(path);
    require_schema(j, path);
    MoleculeFile mf;
    try {
        mf.name = j.value("name", std::string{});
        mf.masses_amu = j.at("masses_amu").get<std::vector<double>>();
        mf.hessian_initial_ev_per_a2 =
            j.at("hessian_initial_ev_per_a2").get<std::vector<std::vector<double>>>();
        mf.hessian_final_ev_per_a2 =
            j.at("hessian_final_ev_per_a2").get<std::vector<std::vector<double>>>();
        mf.equilibrium_initial_angstrom =
            j.at("equilibrium_initial_angstrom").get<std::vector<double>>();
        mf.equilibrium_final_angstrom =
            j.at("equilibrium_final_angstrom").get<std::vector<double>>();
        if (j.contains("mode_labels")) {
            mf.mode_labels = j["mode_labels"].get<std::vector<std::string>>();
        }
    } catch (const json::exception& err) {
        throw validation_error("molecule file " + path + ": " + err.what());
    }
    return mf;
}

void save_molecule(const std::string& path, const MoleculeFile& molecule) {
    json j;
    j["schema_version"] = 1;
    j["name"] = molecule.name;
    j["masses_amu"] = molecule.masses_amu;
    j["hessian_initial_ev_per_a2"] = molecule.hessian_initial_ev_per_a2;
    j["hessian_final_ev_per_a2"] = molecule.hessian_final_ev_per_a2;
    j["equilibrium_initial_angstrom"] = molecule.equilibrium_initial_angstrom;
    j["equilibrium_final_angstrom"] = molecule.equilibrium_final_angstrom;
    if (!molecule.mode_labels.empty()) j["mode_labels"] = molecule.mode_labels;
    write_text_file(path, j.dump(2) + "\n");
}

std::pair<ForceField, ForceField> to_internal(const MoleculeFile& molecule) {
    const auto n = static_cast<Eigen::Index>(molecule.masses_amu.size());
    auto hessian = [&](const std::vector<std::vector<double>>& rows,
                       const char* which) -> Eigen::MatrixXd {
        if (static_cast<Eigen::Index>(rows.size()) != n) {
            throw validation_error(std::string("molecule: ") + which + " row count mismatch");
        }
        Eigen::MatrixXd a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
                throw validation_error(std::string("molecule: ") + which + " is ragged");
            }
            for (Eigen::Index c = 0; c < n; ++c) {
                a(i, c) = units::hessian_to_internal(
                    rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
            }
        }
        return a;
    };
    auto displacement = [&](const std::vector<double>& values,
                            const char* which) -> Eigen::VectorXd {
        if (static_cast<Eigen::Index>(values.size()) != n) {
            throw validation_error(std::string("molecule: ") + which + " length mismatch");
        }
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v(i) = units::displacement_to_internal(values[static_cast<std::size_t>(i)]);
        }
        return v;
    };

    Eigen::VectorXd masses(n);
    for (Eigen::Index i = 0; i < n; ++i) masses(i) = molecule.masses_amu[static_cast<std::size_t>(i)];

    ForceField initial{masses, hessian(molecule.hessian_initial_ev_per_a2, "initial hessian"),
                       displacement(molecule.equilibrium_initial_angstrom, "initial equilibrium"),
                       "initial"};
    ForceField final_ff{masses, hessian(molecule.hessian_final_ev_per_a2, "final hessian"),
                        displacement(molecule.equilibrium_final_angstrom, "final equilibrium"),
                        "final"};
    validate(initial);
    validate(final_ff);
    return {initial, final_ff};
}

MoleculeFile from_internal(const ForceField& initial, const ForceField& final_ff,
                           const std::string& name) {
    MoleculeFile mf;
    mf.name = name;
    const Eigen::Index n = initial.masses.size();
    for (Eigen::Index i = 0; i < n; ++i) mf.masses_amu.push_back(initial.masses(i));
    auto hessian_rows = [&](const Eigen::MatrixXd& a) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index i = 0; i < n; ++i) {
            std::vector<double> row;
            for (Eigen::Index c = 0; c < n; ++c) {
                row.push_back(units::hessian_to_file(a(i, c)));
            }
            rows.push_back(std::move(row));
        }
        return rows;
    };
    mf.hessian_initial_ev_per_a2 = hessian_rows(initial.hessian);
    mf.hessian_final_ev_per_a2 = hessian_rows(final_ff.hessian);
    for (Eigen::Index i = 0; i < n; ++i) {
        mf.equilibrium_initial_angstrom.push_back(
            units::displacement_to_file(initial.equilibrium(i)));
        mf.equilibrium_final_angstrom.push_back(
            units::displacement_to_file(final_ff.equilibrium(i)));
    }
    return mf;
}

// --- run configuration ---------------------------------------------------------

RunConfig load_config(const std::string& path) {
    const json j = parse_json_file(path);
    require_schema(j, path);
    RunConfig config;
    try {
        if (j.contains("hardware")) {
            const json& hw = j["hardware"];
            config.omega_min_ghz = hw.value("omega_min_ghz", config.omega_min_ghz);
            config.omega_max_ghz = hw.value("omega_max_ghz", config.omega_max_ghz);
            config.t_cryo_mk = hw.value("t_cryo_mk", config.t_cryo_mk);
            config.b_max_inv_nh = hw.value("b_max_inv_nh", config.b_max_inv_nh);
        }
        if (j.contains("capacitance_rule")) {
            const json& rule = j["capacitance_rule"];
            config.c0_pf = rule.value("c0_pf", config.c0_pf);
            config.m0_amu = rule.value("m0_amu", config.m0_amu);
        }
        config.kappa_strategy = j.value("kappa_strategy", config.kappa_strategy);
        config.t_molecule_k = j.value("t_molecule_k", config.t_molecule_k);
        if (j.contains("lambda_regulators_mev")) {
            config.lambda_regulators_mev =
                j["lambda_regulators_mev"].get<std::vector<double>>();
        }
        config.protocol = j.value("protocol", config.protocol);
        config.epsilon = j.value("epsilon", config.epsilon);
        config.t_sw = j.value("t_sw", config.t_sw);
        if (j.contains("sweep")) {
            const json& sweep = j["sweep"];
            config.sweep_omega_t_min = sweep.value("omega_t_min", config.sweep_omega_t_min);
            config.sweep_omega_t_max = sweep.value("omega_t_max", config.sweep_omega_t_max);
            config.sweep_points = sweep.value("points", config.sweep_points);
        }
        if (j.contains("fcp")) {
            const json& fcp = j["fcp"];
            config.fcp_n_max = fcp.value("n_max", config.fcp_n_max);
            config.fcp_quadrature_order = fcp.value("quadrature_order", config.fcp_quadrature_order);
        }
        if (j.contains("ghz")) {
            const json& ghz = j["ghz"];
            config.ghz_chi = ghz.value("chi", config.ghz_chi);
            config.ghz_tau_max = ghz.value("tau_max", config.ghz_tau_max);
            config.ghz_tau_samples = ghz.value("tau_samples", config.ghz_tau_samples);
            config.ghz_energy_max = ghz.value("energy_max", config.ghz_energy_max);
            config.ghz_energy_samples = ghz.value("energy_samples", config.ghz_energy_samples);
            config.ghz_window = ghz.value("window", config.ghz_window);
        }
        if (j.contains("squid")) {
            const json& squid = j["squid"];
            config.squid_target_c3_over_c2 =
                squid.value("target_c3_over_c2", config.squid_target_c3_over_c2);
            config.squid_target_c4_over_c2 =
                squid.value("target_c4_over_c2", config.squid_target_c4_over_c2);
            config.squid_phi0 = squid.value("phi0", config.squid_phi0);
            config.squid_l = squid.value("l", config.squid_l);
        }
        config.out_dir = j.value("out_dir", config.out_dir);
    } catch (const json::exception& err) {
        throw validation_error("config file " + path + ": " + err.what());
    }
    validate(config);
    return config;
}

void validate(const RunConfig& config) {
    if (!(config.omega_min_ghz > 0.0) || !(config.omega_max_ghz > config.omega_min_ghz)) {
        throw validation_error("config: hardware frequency window must satisfy 0 < min < max");
    }
    if (!(config.t_cryo_mk > 0.0)) throw validation_error("config: t_cryo_mk must be positive");
    if (!(config.b_max_inv_nh > 0.0)) throw validation_error("config: b_max_inv_nh must be positive");
    if (!(config.c0_pf > 0.0) || !(config.m0_amu > 0.0)) {
        throw validation_error("config: capacitance rule must be positive");
    }
    if (config.kappa_strategy != "frequency-cap" && config.kappa_strategy != "temperature-match" &&
        config.kappa_strategy != "coupling-cap") {
        throw validation_error("config: unknown kappa strategy '" + config.kappa_strategy + "'");
    }
    if (!(config.t_molecule_k > 0.0)) throw validation_error("config: t_molecule_k must be positive");
    for (double lambda : config.lambda_regulators_mev) {
        if (!(lambda > 0.0)) throw validation_error("config: regulator frequencies must be positive");
    }
    if (config.protocol != 1 && config.protocol != 2) {
        throw validation_error("config: protocol must be 1 or 2");
    }
    if (!(config.epsilon > 0.0)) throw validation_error("config: epsilon must be positive");
    if (config.t_sw < 0.0) throw validation_error("config: t_sw must be nonnegative");
    if (!(config.sweep_omega_t_min > 0.0) ||
        !(config.sweep_omega_t_max > config.sweep_omega_t_min) || config.sweep_points < 3) {
        throw validation_error("config: sweep grid must be positive, increasing, >= 3 points");
    }
    if (config.fcp_n_max < 1) throw validation_error("config: fcp n_max must be >= 1");
    if (config.fcp_quadrature_order < 0) {
        throw validation_error("config: fcp quadrature order must be >= 0");
    }
    if (!(config.ghz_chi > 0.0) || config.ghz_chi > 0.1) {
        throw validation_error("config: ghz chi must lie in (0, 0.1]");
    }
    if (config.ghz_tau_max < 0.0 || config.ghz_energy_max < 0.0) {
        throw validation_error("config: ghz grid extents must be nonnegative");
    }
    if (config.ghz_tau_samples < 2 || config.ghz_energy_samples < 2) {
        throw validation_error("config: ghz grids need at least 2 samples");
    }
    if (config.ghz_window != "hann" && config.ghz_window != "rectangular") {
        throw validation_error("config: unknown ghz window '" + config.ghz_window + "'");
    }
    if (!(config.squid_phi0 > 0.0) || !(config.squid_l > 0.0)) {
        throw validation_error("config: squid phi0 and l must be positive");
    }
}

HardwareConstraints hardware_from(const RunConfig& config) {
    const units::CircuitCalibration calibration = calibration_from(config);
    HardwareConstraints hw;
    hw.omega_min = units::ghz_to_internal(config.omega_min_ghz);
    hw.omega_max = units::ghz_to_internal(config.omega_max_ghz);
    hw.b_max = config.b_max_inv_nh / calibration.coupling_to_inv_nh(1.0);
    hw.t_cryo = units::mk_to_internal(config.t_cryo_mk);
    return hw;
}

units::CircuitCalibration calibration_from(const RunConfig& config) {
    return units::CircuitCalibration{config.c0_pf, config.m0_amu};
}

KappaStrategy strategy_from(const RunConfig& config, const Eigen::MatrixXd& capacitance) {
    if (config.kappa_strategy == "temperature-match") {
        const double t_molecule = units::mk_to_internal(config.t_molecule_k * 1000.0);
        return TemperatureMatch{t_molecule};
    }
    if (config.kappa_strategy == "coupling-cap") {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(capacitance);
        return CouplingCap{eig.eigenvalues().maxCoeff()};
    }
    return FrequencyCap{};
}

Eigen::MatrixXd default_capacitance(const RunConfig& config, const ForceField& ff) {
    // Internal capacitance equals the mass matrix; the calibration constants
    // c0/m0 turn it into picofarad at the output boundary.
    (void)config;
    return Eigen::MatrixXd(ff.masses.asDiagonal());
}

// --- plan files -----------------------------------------------------------------

void save_plan(const std::string& path, const ProtocolPlan& plan,
               const Eigen::MatrixXd& capacitance) {
    validate(plan);
    json j;
    j["schema_version"] = 1;
    j["mode"] = plan.mode == PlanMode::force_field ? "force-field" : "normal-mode";
    j["kappa"] = plan.kappa;
    j["capacitance"] = matrix_to_json(capacitance);
    j["b_start"] = matrix_to_json(plan.b_start);
    j["b_end"] = matrix_to_json(plan.b_end);
    j["v_start"] = vector_to_json(plan.v_start);
    j["v_end"] = vector_to_json(plan.v_end);
    if (plan.basis.size() > 0) {
        j["basis"] = matrix_to_json(plan.basis);
    } else {
        j["basis"] = nullptr;
    }
    write_text_file(path, j.dump(2) + "\n");
}

PlanFile load_plan(const std::string& path) {
    const json j = parse_json_file(path);
    require_schema(j, path);
    PlanFile file;
    try {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "force-field") {
            file.plan.mode = PlanMode::force_field;
        } else if (mode == "normal-mode") {
            file.plan.mode = PlanMode::normal_mode;
        } else {
            throw validation_error(path + ": unknown plan mode '" + mode + "'");
        }
        file.plan.kappa = j.at("kappa").get<double>();
        file.capacitance = matrix_from_json(j.at("capacitance"), "plan capacitance");
        file.plan.b_start = matrix_from_json(j.at("b_start"), "plan b_start");
        file.plan.b_end = matrix_from_json(j.at("b_end"), "plan b_end");
        file.plan.v_start = vector_from_json(j.at("v_start"), "plan v_start");
        file.plan.v_end = vector_from_json(j.at("v_end"), "plan v_end");
        if (j.contains("basis") && !j["basis"].is_null()) {
            file.plan.basis = matrix_from_json(j["basis"], "plan basis");
        }
    } catch (const json::exception& err) {
        throw validation_error("plan file " + path + ": " + err.what());
    }
    validate(file.plan);
    return file;
}

// --- CSV -------------------------------------------------------------------------

std::string circuit_table_csv(const CircuitTable& table) {
    std::ostringstream out;
    out << "element,quantity,value,unit\n";
    for (const CircuitTable::Row& row : table.rows) {
        out << row.element << ',' << row.quantity << ',' << format_double(row.value) << ','
            << row.unit << '\n';
    }
    return out.str();
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "t_sw,t_sw_times_omega_max,mean_norm_diff,variance\n";
    for (const SweepRow& row : sweep.rows) {
        out << format_double(row.t_sw) << ',' << format_double(row.t_sw_omega_max) << ','
            << format_double(row.mean_norm_diff) << ',' << format_double(row.variance) << '\n';
    }
    return out.str();
}

std::string spectrum_csv(const LineSpectrum& spectrum) {
    std::ostringstream out;
    out << "# schema_version=1\n";
    out << "# zero_point=" << format_double(spectrum.zero_point) << '\n';
    out << "# truncation_tail=" << format_double(spectrum.truncation_tail) << '\n';
    out << "energy,probability,occupations\n";
    for (const SpectralLine& line : spectrum.lines) {
        out << format_double(line.energy) << ',' << format_double(line.probability) << ',';
        for (std::size_t v = 0; v < line.occupations.size(); ++v) {
            if (v > 0) out << '|';
            const std::vector<int>& occ = line.occupations[v];
            for (std::size_t i = 0; i < occ.size(); ++i) {
                if (i > 0) out << ';';
                out << occ[i];
            }
        }
        out << '\n';
    }
    return out.str();
}

namespace {

double parse_double_field(const std::string& field, const std::string& what) {
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw validation_error("csv: cannot parse " + what + " from '" + field + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delim)) fields.push_back(field);
    return fields;
}

} // namespace

LineSpectrum parse_spectrum_csv(const std::string& text) {
    LineSpectrum spectrum;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                const std::string key = line.substr(2, eq - 2);
                const std::string value = line.substr(eq + 1);
                if (key == "zero_point") {
                    spectrum.zero_point = parse_double_field(value, "zero_point");
                } else if (key == "truncation_tail") {
                    spectrum.truncation_tail = parse_double_field(value, "truncation_tail");
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != "energy,probability,occupations") {
                throw validation_error("spectrum csv: unexpected header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() < 2) throw validation_error("spectrum csv: short row '" + line + "'");
        SpectralLine spectral_line;
        spectral_line.energy = parse_double_field(fields[0], "energy");
        spectral_line.probability = parse_double_field(fields[1], "probability");
        if (fields.size() >= 3 && !fields[2].empty()) {
            for (const std::string& label : split(fields[2], '|')) {
                std::vector<int> occ;
                for (const std::string& item : split(label, ';')) {
                    occ.push_back(static_cast<int>(parse_double_field(item, "occupation")));
                }
                spectral_line.occupations.push_back(std::move(occ));
            }
        }
        spectrum.lines.push_back(std::move(spectral_line));
    }
    if (!header_seen) throw validation_error("spectrum csv: missing header");
    return spectrum;
}

std::string xy_csv(const std::string& x_name, const std::string& y_name,
                   const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw validation_error("xy_csv: column lengths differ");
    std::ostringstream out;
    out << x_name << ',' << y_name << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
    }
    return out.str();
}

std::pair<std::vector<double>, std::vector<double>> parse_xy_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> x, y;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 2) throw validation_error("csv: expected two columns in '" + line + "'");
        x.push_back(parse_double_field(fields[0], "x"));
        y.push_back(parse_double_field(fields[1], "y"));
    }
    if (!header_seen) throw validation_error("csv: missing header");
    return {std::move(x), std::move(y)};
}

} // namespace fcemu
