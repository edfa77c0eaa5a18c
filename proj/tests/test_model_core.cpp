#include <cmath>
#include <random>

#include <doctest.h>

#include "fcemu/errors.hpp"
#include "fcemu/force_field.hpp"
#include "fcemu/gaussian_state.hpp"
#include "fcemu/linalg.hpp"
#include "support.hpp"

using namespace fcemu;
using test_support::random_force_field;
using test_support::random_orthogonal;

namespace {

ForceField unit_mass_field(const Eigen::MatrixXd& hessian) {
    const Eigen::Index n = hessian.rows();
    return ForceField{Eigen::VectorXd::Ones(n), hessian, Eigen::VectorXd::Zero(n), "test"};
}

EmulatorModel single_mode_model(double omega2, double drive) {
    Eigen::MatrixXd c(1, 1), b(1, 1);
    c << 1.0;
    b << omega2;
    Eigen::VectorXd v(1);
    v << drive;
    return EmulatorModel{c, b, v, 1.0};
}

// Independent oracle: ground energy of H = p^2/2 + F x^2/2 - w x from a
// finite harmonic-oscillator basis with a deliberately mismatched basis
// frequency, so the diagonalization has to do real work.
double finite_basis_ground_energy(double stiffness, double drive, int basis_size) {
    const double omega0 = 1.3 * std::sqrt(stiffness);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(basis_size, basis_size);
    for (int n = 0; n < basis_size; ++n) {
        // <n|p^2|n>, <n|x^2|n> in the omega0 ladder basis
        h(n, n) = 0.25 * omega0 * (2 * n + 1) + 0.25 * (stiffness / omega0) * (2 * n + 1);
        if (n + 2 < basis_size) {
            const double cross = std::sqrt((n + 1.0) * (n + 2.0));
            const double value = -0.25 * omega0 * cross + 0.25 * (stiffness / omega0) * cross;
            h(n, n + 2) = value;
            h(n + 2, n) = value;
        }
        if (n + 1 < basis_size) {
            const double value = -drive * std::sqrt((n + 1.0) / (2.0 * omega0));
            h(n, n + 1) = value;
            h(n + 1, n) = value;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    return solver.eigenvalues()(0);
}

} // namespace

TEST_SUITE("model-core") {

TEST_CASE("normal modes of a 2x2 model with one zero mode") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, -1.0, -1.0, 1.0;
    const NormalModes nm = normal_modes(unit_mass_field(a));
    CHECK(nm.kernel_dim == 1);
    CHECK(nm.frequencies(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(nm.frequencies(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("isotropic hessian gives degenerate frequencies") {
    const double omega = 0.7;
    const Eigen::MatrixXd a = omega * omega * Eigen::MatrixXd::Identity(3, 3);
    const NormalModes nm = normal_modes(unit_mass_field(a));
    CHECK(nm.kernel_dim == 0);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(nm.frequencies(i) == doctest::Approx(omega).epsilon(1e-12));
    }
}

TEST_CASE("mass weighting") {
    ForceField ff;
    ff.masses = Eigen::VectorXd(2);
    ff.masses << 1.0, 4.0;
    ff.hessian = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    ff.equilibrium = Eigen::VectorXd::Zero(2);
    const NormalModes nm = normal_modes(ff);
    CHECK(nm.frequencies(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(nm.frequencies(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("invalid force fields are rejected") {
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(normal_modes(unit_mass_field(asym)), validation_error);

    Eigen::MatrixXd negative(2, 2);
    negative << -1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(normal_modes(unit_mass_field(negative)), validation_error);

    ForceField bad_mass = unit_mass_field(Eigen::MatrixXd::Identity(2, 2));
    bad_mass.masses(0) = 0.0;
    CHECK_THROWS_AS(normal_modes(bad_mass), validation_error);
}

TEST_CASE("mode reconstruction reproduces the mass-weighted hessian") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const ForceField ff = random_force_field(4, rng);
        const NormalModes nm = normal_modes(ff);
        const Eigen::MatrixXd k = mass_weighted_hessian(ff);
        const Eigen::MatrixXd rebuilt =
            nm.modes * nm.frequencies.array().square().matrix().asDiagonal() *
            nm.modes.transpose();
        CHECK((rebuilt - k).norm() <= 1e-10 * k.norm());
        CHECK((nm.modes.transpose() * nm.modes - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
    }
}

TEST_CASE("rank-one regulator update, worked 2x2 case") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, -1.0, -1.0, 1.0;
    const ForceField regulated = remove_null_space(unit_mass_field(a), {1.0});
    Eigen::MatrixXd expected(2, 2);
    expected << 1.5, -0.5, -0.5, 1.5;
    CHECK((regulated.hessian - expected).norm() < 1e-12);
    const NormalModes nm = normal_modes(regulated);
    CHECK(nm.kernel_dim == 0);
    CHECK(nm.frequencies(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nm.frequencies(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("no null space, empty regulator list is the identity") {
    std::mt19937 rng(7);
    const ForceField ff = random_force_field(3, rng);
    const ForceField same = remove_null_space(ff, {});
    CHECK((same.hessian - ff.hessian).norm() == 0.0);
}

TEST_CASE("three-atom chain keeps its physical frequencies") {
    ForceField chain;
    chain.masses = Eigen::VectorXd(3);
    chain.masses << 1.0, 12.0, 1.0;
    const double k1 = 1.3, k2 = 0.9;
    chain.hessian = Eigen::MatrixXd(3, 3);
    chain.hessian << k1, -k1, 0.0, -k1, k1 + k2, -k2, 0.0, -k2, k2;
    chain.equilibrium = Eigen::VectorXd::Zero(3);

    const NormalModes before = normal_modes(chain);
    REQUIRE(before.kernel_dim == 1);
    const ForceField regulated = remove_null_space(chain, {0.35});
    const NormalModes after = normal_modes(regulated);
    CHECK(after.kernel_dim == 0);
    for (Eigen::Index i = 1; i < 3; ++i) {
        const double original = before.frequencies(i);
        bool preserved = false;
        for (Eigen::Index j = 0; j < 3; ++j) {
            if (std::abs(after.frequencies(j) - original) <= 1e-10 * original) preserved = true;
        }
        CHECK(preserved);
    }
}

TEST_CASE("regulators preserve planted spectra") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 5;
        Eigen::VectorXd omega2(n);
        omega2 << 0.0, 0.0, 1.1, 2.3, 3.7;
        const Eigen::MatrixXd k = test_support::random_symmetric_with_spectrum(omega2, rng);
        ForceField ff = unit_mass_field(k);
        const NormalModes nm = normal_modes(ff);
        REQUIRE(nm.kernel_dim == 2);
        const ForceField regulated = remove_null_space(ff, {0.4, 0.5});
        const NormalModes after = normal_modes(regulated);
        CHECK(after.kernel_dim == 0);
        for (Eigen::Index i = 2; i < n; ++i) {
            const double target = std::sqrt(omega2(i));
            double best = 1e9;
            for (Eigen::Index j = 0; j < n; ++j) {
                best = std::min(best, std::abs(after.frequencies(j) - target));
            }
            CHECK(best <= 1e-10 * target);
        }
    }
}

TEST_CASE("regulator close to a physical frequency raises a warning") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, -1.0, -1.0, 1.0;
    std::vector<std::string> warnings;
    remove_null_space(unit_mass_field(a), {std::sqrt(2.0) * 1.001}, &warnings);
    CHECK(warnings.size() == 1);
    remove_null_space(unit_mass_field(a), {0.5}, &warnings);
    CHECK(warnings.size() == 1);
}

TEST_CASE("regulator count mismatch is an argument error") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, -1.0, -1.0, 1.0;
    CHECK_THROWS_AS(remove_null_space(unit_mass_field(a), {}), validation_error);
    CHECK_THROWS_AS(remove_null_space(unit_mass_field(a), {1.0, 2.0}), validation_error);
    CHECK_THROWS_AS(remove_null_space(unit_mass_field(a), {-1.0}), validation_error);
}

TEST_CASE("single-mode vacuum") {
    const GaussianState state = ground_state(single_mode_model(4.0, 0.0)); // omega = 2
    CHECK(state.mean.norm() == doctest::Approx(0.0));
    CHECK(state.second_moments(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(state.second_moments(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mean_energy(state, single_mode_model(4.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    validate(state);
}

TEST_CASE("displaced vacuum") {
    const double v0 = 0.8;
    const GaussianState state = ground_state(single_mode_model(1.0, v0));
    CHECK(state.mean(0) == doctest::Approx(v0).epsilon(1e-12));
    CHECK(state.mean(1) == doctest::Approx(0.0));
    CHECK(state.second_moments(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(state.second_moments(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("undriven models have zero stationary mean") {
    std::mt19937 rng(3);
    const Eigen::MatrixXd c = test_support::random_spd(3, rng);
    const Eigen::MatrixXd b = test_support::random_spd(3, rng, 1.0, 4.0);
    const EmulatorModel model{c, b, Eigen::VectorXd::Zero(3), 1.0};
    CHECK(ground_state(model).mean.norm() == doctest::Approx(0.0));
}

TEST_CASE("singular coupling is rejected") {
    Eigen::MatrixXd b(2, 2);
    b << 1.0, -1.0, -1.0, 1.0;
    const EmulatorModel model{Eigen::MatrixXd::Identity(2, 2), b, Eigen::VectorXd::Zero(2), 1.0};
    CHECK_THROWS_AS(ground_state(model), validation_error);
}

TEST_CASE("ground states are pure") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd c = test_support::random_spd(3, rng);
        const Eigen::MatrixXd b = test_support::random_spd(3, rng, 1.0, 6.0);
        const EmulatorModel model{c, b, test_support::random_vector(3, rng), 1.0};
        const GaussianState state = ground_state(model);
        validate(state);
        CHECK(is_pure(state, 1e-8));
    }
}

TEST_CASE("thermal state closed forms") {
    const EmulatorModel model = single_mode_model(1.0, 0.0);
    const GaussianState cold = thermal_state(model, 0.0);
    const GaussianState vacuum = ground_state(model);
    CHECK((cold.second_moments - vacuum.second_moments).norm() == 0.0);

    const double coth_half = 1.0 / std::tanh(0.5);
    const GaussianState warm = thermal_state(model, 1.0);
    CHECK(warm.second_moments(0, 0) == doctest::Approx(coth_half).epsilon(1e-12));
    CHECK(warm.second_moments(1, 1) == doctest::Approx(coth_half).epsilon(1e-12));
    CHECK(coth_half == doctest::Approx(2.1640).epsilon(1e-4));

    // Bose-Einstein occupation recovered from the covariance.
    const double omega = 1.0, temperature = 1.0;
    const double n_from_gamma =
        (warm.second_moments(0, 0) * omega + warm.second_moments(1, 1) / omega) / 4.0 - 0.5;
    const double n_bose = 1.0 / (std::exp(omega / temperature) - 1.0);
    CHECK(n_from_gamma == doctest::Approx(n_bose).epsilon(1e-12));

    CHECK_THROWS_AS(thermal_state(model, -0.1), validation_error);
}

TEST_CASE("thermal covariance dominates the vacuum covariance") {
    std::mt19937 rng(17);
    const Eigen::MatrixXd c = test_support::random_spd(3, rng);
    const Eigen::MatrixXd b = test_support::random_spd(3, rng, 1.0, 4.0);
    const EmulatorModel model{c, b, Eigen::VectorXd::Zero(3), 1.0};
    const GaussianState vacuum = ground_state(model);
    for (double t : {0.2, 1.0, 5.0}) {
        const GaussianState warm = thermal_state(model, t);
        const Eigen::MatrixXd diff = warm.second_moments - vacuum.second_moments;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(diff);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("mean energy closed forms") {
    const EmulatorModel unit = single_mode_model(1.0, 0.0);
    const GaussianState vacuum = ground_state(unit);
    CHECK(mean_energy(vacuum, unit) == doctest::Approx(0.5).epsilon(1e-12));

    // vacuum of omega=1 measured in the omega=2 model
    const EmulatorModel stiff = single_mode_model(4.0, 0.0);
    CHECK(mean_energy(vacuum, stiff) == doctest::Approx(1.25).epsilon(1e-12));

    const GaussianState warm = thermal_state(unit, 1.0);
    CHECK(mean_energy(warm, unit) == doctest::Approx(0.5 / std::tanh(0.5)).epsilon(1e-12));
    CHECK(mean_energy(warm, unit) == doctest::Approx(1.0820).epsilon(1e-4));

    GaussianState short_state = vacuum;
    short_state.mean = Eigen::VectorXd::Zero(4);
    CHECK_THROWS_AS(mean_energy(short_state, unit), validation_error);
}

TEST_CASE("ground energy matches a finite-basis diagonalization and the mode sum") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> stiffness_dist(0.5, 3.0);
    std::uniform_real_distribution<double> drive_dist(-0.6, 0.6);
    for (int trial = 0; trial < 5; ++trial) {
        const double f = stiffness_dist(rng);
        const double w = drive_dist(rng);
        const EmulatorModel model = single_mode_model(f, w);
        const double from_moments = mean_energy(ground_state(model), model);
        const double oracle = finite_basis_ground_energy(f, w, 60);
        CHECK(from_moments == doctest::Approx(oracle).epsilon(1e-8));
        // closed form: omega/2 - w^2 / (2 omega^2)
        CHECK(from_moments ==
              doctest::Approx(0.5 * std::sqrt(f) - w * w / (2.0 * f)).epsilon(1e-12));
    }

    // multimode: E0 = sum omega/2 - 1/2 V^T B^-1 V
    const Eigen::Index n = 3;
    const Eigen::MatrixXd c = test_support::random_spd(n, rng);
    const Eigen::MatrixXd b = test_support::random_spd(n, rng, 1.0, 5.0);
    const Eigen::VectorXd v = test_support::random_vector(n, rng);
    const EmulatorModel model{c, b, v, 1.0};
    const double expected =
        0.5 * mode_frequencies(model).sum() - 0.5 * v.dot(b.ldlt().solve(v));
    CHECK(mean_energy(ground_state(model), model) == doctest::Approx(expected).epsilon(1e-10));
}

} // TEST_SUITE
