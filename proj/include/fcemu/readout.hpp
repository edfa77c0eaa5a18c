#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fcemu/spectrum.hpp"

namespace fcemu {

// Dispersive qubit-per-resonator readout chain, one entry per mode.
struct DispersiveSetup {
    Eigen::VectorXd coupling;  // g_j
    Eigen::VectorXd detuning;  // Delta_j
    Eigen::VectorXd decay;     // gamma_j (resonator linewidth)
    Eigen::VectorXd qubit_gap; // bare qubit splittings
    double readout_frequency = 0.0;
};

void validate(const DispersiveSetup& setup);

struct DispersiveShift {
    double qubit_splitting = 0.0; // Omega_n = Omega_0 + (2n+1) g^2/Delta
    double stark_shift = 0.0;     // xi_0 = g^2/Delta
};

DispersiveShift dispersive_shift(const DispersiveSetup& setup, Eigen::Index mode,
                                 int occupation);

// Readout-cavity frequency seen when the qubit drive does / does not match
// the occupation-dependent splitting.
double readout_frequency(const DispersiveSetup& setup, Eigen::Index mode,
                         bool drive_matches_splitting);

struct PhotonResolution {
    int count = 0;                          // floor(2 xi_0 / gamma)
    bool below_spectroscopic_minimum = false; // count < 3
};

PhotonResolution resolvable_photons(const DispersiveSetup& setup, Eigen::Index mode);

// GHZ-register total-energy interferometry.
struct GhzSetup {
    double chi = 0.05; // coupling fraction g_j = chi * omega_j; must stay <= 0.1
    std::vector<double> tau_grid;
    std::vector<double> energy_grid;
    enum class Window { rectangular, hann } window = Window::hann;
};

void validate(const GhzSetup& setup);

// P1(tau) = sum_k p_k sin^2(chi E_k tau); requires a normalized spectrum
// (truncation tail below 1e-6).
std::vector<double> ghz_forward(const LineSpectrum& spectrum, const GhzSetup& setup);

// Windowed Fourier-cosine inversion of P1 back to a density on the energy
// grid. The tau grid must be uniform; the mean of P1 is removed before
// transforming (the infinite-time integral does this implicitly).
std::vector<double> ghz_reconstruct(const std::vector<double>& p1, const GhzSetup& setup);

} // namespace fcemu
