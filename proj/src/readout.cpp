#include "fcemu/readout.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fcemu/errors.hpp"

namespace fcemu {

void validate(const DispersiveSetup& setup) {
    const Eigen::Index n = setup.coupling.size();
    if (n == 0) throw validation_error("dispersive setup: empty");
    if (setup.detuning.size() != n || setup.decay.size() != n || setup.qubit_gap.size() != n) {
        throw validation_error("dispersive setup: per-mode vectors must share length");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (setup.detuning(j) == 0.0) {
            throw validation_error("dispersive setup: zero detuning");
        }
        if (std::abs(setup.coupling(j) / setup.detuning(j)) >= 0.3) {
            std::ostringstream msg;
            msg << "dispersive setup: |g/Delta| = "
                << std::abs(setup.coupling(j) / setup.detuning(j)) << " on mode " << j
                << " leaves the dispersive regime (limit 0.3)";
            throw validation_error(msg.str());
        }
        if (!(setup.decay(j) > 0.0)) {
            throw validation_error("dispersive setup: decay rates must be positive");
        }
    }
}

namespace {

void check_mode(const DispersiveSetup& setup, Eigen::Index mode) {
    if (mode < 0 || mode >= setup.coupling.size()) {
        throw validation_error("dispersive setup: mode index out of range");
    }
}

} // namespace

DispersiveShift dispersive_shift(const DispersiveSetup& setup, Eigen::Index mode,
                                 int occupation) {
    validate(setup);
    check_mode(setup, mode);
    if (occupation < 0) throw validation_error("dispersive_shift: occupation must be >= 0");
    const double xi = setup.coupling(mode) * setup.coupling(mode) / setup.detuning(mode);
    DispersiveShift shift;
    shift.stark_shift = xi;
    shift.qubit_splitting = setup.qubit_gap(mode) + (2.0 * occupation + 1.0) * xi;
    return shift;
}

double readout_frequency(const DispersiveSetup& setup, Eigen::Index mode,
                         bool drive_matches_splitting) {
    validate(setup);
    check_mode(setup, mode);
    if (drive_matches_splitting) return setup.readout_frequency;
    const double xi = setup.coupling(mode) * setup.coupling(mode) / setup.detuning(mode);
    return setup.readout_frequency - xi;
}

PhotonResolution resolvable_photons(const DispersiveSetup& setup, Eigen::Index mode) {
    validate(setup);
    check_mode(setup, mode);
    const double xi =
        std::abs(setup.coupling(mode) * setup.coupling(mode) / setup.detuning(mode));
    PhotonResolution resolution;
    resolution.count = static_cast<int>(std::floor(2.0 * xi / setup.decay(mode)));
    resolution.below_spectroscopic_minimum = resolution.count < 3;
    return resolution;
}

void validate(const GhzSetup& setup) {
    if (!(setup.chi > 0.0) || setup.chi > 0.1) {
        throw validation_error("ghz setup: chi must lie in (0, 0.1]");
    }
    auto strictly_increasing = [](const std::vector<double>& grid) {
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (!(grid[i] > grid[i - 1])) return false;
        }
        return true;
    };
    if (setup.tau_grid.size() < 2 || !strictly_increasing(setup.tau_grid)) {
        throw validation_error("ghz setup: tau grid must be strictly increasing");
    }
    if (setup.energy_grid.empty() || !strictly_increasing(setup.energy_grid)) {
        throw validation_error("ghz setup: energy grid must be strictly increasing");
    }
}

std::vector<double> ghz_forward(const LineSpectrum& spectrum, const GhzSetup& setup) {
    validate(setup);
    if (spectrum.truncation_tail >= 1e-6) {
        throw validation_error("ghz_forward: spectrum is not normalized (tail >= 1e-6)");
    }
    std::vector<double> p1(setup.tau_grid.size(), 0.0);
    for (std::size_t i = 0; i < setup.tau_grid.size(); ++i) {
        const double tau = setup.tau_grid[i];
        double value = 0.0;
        for (const SpectralLine& line : spectrum.lines) {
            const double s = std::sin(setup.chi * line.energy * tau);
            value += line.probability * s * s;
        }
        p1[i] = value;
    }
    return p1;
}

std::vector<double> ghz_reconstruct(const std::vector<double>& p1, const GhzSetup& setup) {
    validate(setup);
    if (p1.size() != setup.tau_grid.size()) {
        throw validation_error("ghz_reconstruct: P1 and tau grid lengths differ");
    }
    const std::size_t m = p1.size();
    const double dt = setup.tau_grid[1] - setup.tau_grid[0];
    for (std::size_t i = 1; i < m; ++i) {
        const double step = setup.tau_grid[i] - setup.tau_grid[i - 1];
        if (std::abs(step - dt) > 1e-9 * dt) {
            throw validation_error("ghz_reconstruct: tau grid must be uniform");
        }
    }
    for (double v : p1) {
        if (!std::isfinite(v)) throw validation_error("ghz_reconstruct: P1 must be finite");
    }

    const double t0 = setup.tau_grid.front();
    const double span = setup.tau_grid.back() - t0;

    // Trapezoid mean removes the DC part that the infinite-time transform
    // integrates away.
    double dc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = (i == 0 || i + 1 == m) ? 0.5 : 1.0;
        dc += w * p1[i];
    }
    dc /= static_cast<double>(m - 1);

    std::vector<double> windowed(m);
    for (std::size_t i = 0; i < m; ++i) {
        double w = 1.0;
        if (setup.window == GhzSetup::Window::hann) {
            w = 0.5 * (1.0 + std::cos(std::numbers::pi * (setup.tau_grid[i] - t0) / span));
        }
        windowed[i] = w * (p1[i] - dc);
    }

    // Exact Fourier-cosine inverse on [0, inf): the prefactor is -8 chi / pi
    // once the spectral density lives on nonnegative energies only.
    const double prefactor = -8.0 * setup.chi / std::numbers::pi;
    std::vector<double> density(setup.energy_grid.size(), 0.0);
    for (std::size_t e = 0; e < setup.energy_grid.size(); ++e) {
        const double freq = 2.0 * setup.chi * setup.energy_grid[e];
        double integral = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = (i == 0 || i + 1 == m) ? 0.5 : 1.0;
            integral += w * windowed[i] * std::cos(freq * setup.tau_grid[i]);
        }
        density[e] = prefactor * integral * dt;
    }
    return density;
}

} // namespace fcemu
