#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fcemu/emulator_model.hpp"
#include "fcemu/force_field.hpp"
#include "fcemu/units.hpp"

namespace fcemu {

// Hardware window in internal units: angular frequencies as energies,
// couplings in internal coupling units, cryostat temperature as energy.
struct HardwareConstraints {
    double omega_min = 0.0;
    double omega_max = 0.0;
    double b_max = 0.0;
    double t_cryo = 0.0;
};

void validate(const HardwareConstraints& hw);

// Rescales a molecular force field onto emulator parameters:
//   B = kappa^2 C^1/2 M^-1/2 A M^-1/2 C^1/2
//   V = kappa^3/2 C^1/2 M^-1/2 A v
// The emulator eigenfrequencies are exactly kappa times the molecular ones.
EmulatorModel rescale(const ForceField& ff, const Eigen::MatrixXd& capacitance, double kappa);

struct FrequencyCap {};
struct TemperatureMatch {
    double t_molecule = 0.0; // molecular temperature, internal energy units
};
struct CouplingCap {
    double capacitance_scale = 1.0; // largest eigenvalue of C, internal units
};
using KappaStrategy = std::variant<FrequencyCap, TemperatureMatch, CouplingCap>;

// Picks the frequency rescaling and verifies the whole rescaled spectrum of
// both configurations fits inside [omega_min, omega_max]. Throws when the
// molecular dynamical range exceeds the hardware window ratio.
double choose_kappa(const NormalModes& initial, const NormalModes& final_modes,
                    const HardwareConstraints& hw, const KappaStrategy& strategy = FrequencyCap{});

enum class PlanMode { force_field, normal_mode };

// Prepared emulator settings for one quench experiment. The start
// configuration carries coupling b_start and driving v_start; the end
// configuration is (b_end, 0). For normal-mode plans, `basis` holds the
// orthogonal transform that diagonalizes the target coupling.
struct ProtocolPlan {
    Eigen::MatrixXd b_start;
    Eigen::MatrixXd b_end;
    Eigen::VectorXd v_start;
    Eigen::VectorXd v_end;
    Eigen::MatrixXd basis; // empty for force-field plans
    PlanMode mode = PlanMode::force_field;
    double kappa = 1.0;
};

void validate(const ProtocolPlan& plan);

// Both planners require null-space-free force fields. Equilibria are
// re-centered on the final configuration so that the end driving vanishes
// exactly while the start state sits at the physical relative displacement.
ProtocolPlan plan_protocol1(const ForceField& initial, const ForceField& final_ff,
                            const HardwareConstraints& hw, const Eigen::MatrixXd& capacitance,
                            const KappaStrategy& strategy = FrequencyCap{});

// Same quench expressed in the eigenbasis of the target coupling, so the run
// ends on uncoupled resonators. Emits a warning when residual capacitive
// coupling keeps C^-1 b_end non-diagonal.
ProtocolPlan plan_protocol2(const ForceField& initial, const ForceField& final_ff,
                            const HardwareConstraints& hw, const Eigen::MatrixXd& capacitance,
                            const KappaStrategy& strategy = FrequencyCap{},
                            std::vector<std::string>* warnings = nullptr);

// Start / end models sharing capacitance and kappa, as prepared by a plan.
EmulatorModel start_model(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance);
EmulatorModel end_model(const ProtocolPlan& plan, const Eigen::MatrixXd& capacitance);

// Observable map between molecular and emulator canonical variables.
struct ObservableMap {
    Eigen::VectorXd masses;
    Eigen::MatrixXd capacitance;
    double kappa = 1.0;

    // x = sqrt(kappa) M^-1/2 C^1/2 phi,  p = kappa^-1/2 M^1/2 C^-1/2 q
    Eigen::VectorXd position_to_emulator(const Eigen::VectorXd& x) const;
    Eigen::VectorXd position_to_molecule(const Eigen::VectorXd& phi) const;
    Eigen::VectorXd momentum_to_emulator(const Eigen::VectorXd& p) const;
    Eigen::VectorXd momentum_to_molecule(const Eigen::VectorXd& q) const;
};

// Laboratory-unit parameter table for a start/end model pair.
struct CircuitTable {
    struct Row {
        std::string element;
        std::string quantity;
        double value;
        std::string unit;
    };
    std::vector<Row> rows;
};

CircuitTable circuit_table(const EmulatorModel& start, const EmulatorModel& end,
                           const units::CircuitCalibration& calibration);

} // namespace fcemu
