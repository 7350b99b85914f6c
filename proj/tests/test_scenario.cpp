#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "oracles.hpp"
#include "subdet/scenario.hpp"

using namespace subdet;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.n = 4;
    cfg.k_p = 2;
    cfg.k_s = 4;
    cfg.r = 2;
    cfg.cnr_db = 10.0;
    cfg.rho_c = 0.5;
    cfg.gamma = 2.0;
    cfg.env = Environment::HE;
    cfg.order = SignalOrder::First;
    return cfg;
}

}  // namespace

TEST_CASE("clutter_covariance: no clutter, white clutter, paper values") {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const ComplexMatrix no_clutter = clutter_covariance(5, neg_inf, 0.9).mat();
    CHECK((no_clutter - ComplexMatrix::Identity(5, 5)).norm() == 0.0);

    const ComplexMatrix white = clutter_covariance(4, 10.0, 0.0).mat();
    CHECK((white - 11.0 * ComplexMatrix::Identity(4, 4)).norm() < 1e-12);

    const ComplexMatrix r = clutter_covariance(16, 30.0, 0.95).mat();
    CHECK(r(0, 1).real() == doctest::Approx(950.0).epsilon(1e-12));
    CHECK(r(0, 0).real() == doctest::Approx(1001.0).epsilon(1e-12));
    CHECK(r(3, 1).real() == doctest::Approx(1000.0 * 0.95 * 0.95).epsilon(1e-12));
}

TEST_CASE("steering_vector: zero phase, alternating phase, unit norm") {
    const ComplexVector v0 = steering_vector(4, 0.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(v0(i).real() == doctest::Approx(0.5));
        CHECK(v0(i).imag() == doctest::Approx(0.0));
    }
    const ComplexVector vpi = steering_vector(4, M_PI);
    for (int i = 0; i < 4; ++i) {
        CHECK(vpi(i).real() == doctest::Approx(i % 2 == 0 ? 0.5 : -0.5));
    }
    const ComplexVector v = steering_vector(9, 0.37);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sector_correlation: diagonal, symmetry, quadrature oracle") {
    const double beta = 0.035;
    const int n = 8;
    const ComplexMatrix rb = sector_correlation(n, beta).mat();
    for (int m = 0; m < n; ++m) {
        CHECK(rb(m, m).real() == doctest::Approx(2.0 * beta * M_PI).epsilon(1e-14));
    }
    CHECK((rb - rb.transpose()).norm() < 1e-14);

    // Entry (m, k) equals the sector integral of e^{j w (k-m)}.
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const int d = k - m;
            const std::complex<double> integral = oracle::simpson(
                [&](double w) { return std::exp(std::complex<double>(0.0, w * d)); },
                -M_PI * beta, M_PI * beta);
            CHECK(std::abs(rb(m, k) - integral) <= 1e-8);
        }
    }
}

TEST_CASE("sector_subspace: complete basis, dominant eigenvector, dominance") {
    const double beta = 0.035;
    const int n = 6;
    const ComplexMatrix full = sector_subspace(n, n, beta).h;
    CHECK((full.adjoint() * full - ComplexMatrix::Identity(n, n)).norm() < 1e-10);

    const ComplexMatrix h1 = sector_subspace(n, 1, beta).h;
    const ComplexMatrix rb = sector_correlation(n, beta).mat();
    const EigenSystem es = hermitian_eig(sector_correlation(n, beta));
    const double lambda_max = es.values(n - 1);
    CHECK((rb * h1 - lambda_max * h1).norm() <= 1e-8 * lambda_max);

    const int r = 3;
    const ComplexMatrix hr = sector_subspace(n, r, beta).h;
    CHECK((hr.adjoint() * hr - ComplexMatrix::Identity(r, r)).norm() <= 1e-10);
    // The kept Rayleigh quotients dominate every discarded eigenvalue.
    for (int j = 0; j < r; ++j) {
        const double rayleigh = (hr.col(j).adjoint() * rb * hr.col(j))(0).real();
        CHECK(rayleigh >= es.values(n - 1 - r) - 1e-10);
    }
}

TEST_CASE("phase_grid covers the closed sector with the requested step") {
    const double beta = std::sin(2.0 * M_PI * 2.0 / 360.0);
    const auto grid = phase_grid(beta, 0.02);
    REQUIRE(!grid.empty());
    CHECK(grid.front() == doctest::Approx(-M_PI * beta));
    CHECK(grid.back() <= M_PI * beta + 1e-9);
    CHECK(grid.back() + 0.02 > M_PI * beta);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.02).epsilon(1e-12));
    }
}

TEST_CASE("draw_signal: zero SINR, exact first-order SINR identity, grid membership") {
    ScenarioConfig cfg = small_config();
    cfg.n = 8;
    cfg.k_p = 4;
    cfg.k_s = 8;
    const ScenarioModel model(cfg);

    RngStream rng(3, 0);
    const SignalDraw zero = model.draw_signal(-std::numeric_limits<double>::infinity(), rng);
    for (const auto& a : zero.amplitudes) {
        CHECK(std::abs(a) == 0.0);
    }

    RngStream rng2(3, 1);
    const double sinr_db = 12.0;
    const SignalDraw draw = model.draw_signal(sinr_db, rng2);
    const double first_mag = std::abs(draw.amplitudes[0]);
    // Independent inverse path for the SINR identity.
    const EigenSystem es = hermitian_eig(model.covariance());
    const ComplexMatrix r_inv =
        es.vectors * es.values.cwiseInverse().asDiagonal() * es.vectors.adjoint();
    double energy = 0.0;
    for (int i = 0; i < cfg.k_p; ++i) {
        CHECK(std::abs(draw.amplitudes[i]) == doctest::Approx(first_mag).epsilon(1e-12));
        const ComplexVector v = steering_vector(cfg.n, draw.phases[i]);
        energy += (v.adjoint() * r_inv * v)(0).real();
    }
    const double realized = first_mag * first_mag * energy;
    CHECK(realized == doctest::Approx(std::pow(10.0, sinr_db / 10.0)).epsilon(1e-10));

    const std::set<double> grid(model.grid().begin(), model.grid().end());
    for (const double phi : draw.phases) {
        CHECK(grid.count(phi) == 1);
        CHECK(phi >= -M_PI * cfg.beta() - 1e-12);
        CHECK(phi <= M_PI * cfg.beta() + 1e-9);
    }
}

TEST_CASE("draw_signal: second-order amplitude variance matches sigma_alpha^2") {
    ScenarioConfig cfg = small_config();
    cfg.order = SignalOrder::Second;
    cfg.cnr_db = -std::numeric_limits<double>::infinity();  // R = I so the scale is deterministic
    const ScenarioModel model(cfg);
    const double sinr_db = 8.0;
    const double sigma2 = std::pow(10.0, sinr_db / 10.0) / cfg.k_p;  // Tr = K_P when R = I
    double acc = 0.0;
    long count = 0;
    for (int t = 0; t < 100000 / cfg.k_p; ++t) {
        RngStream rng(17, static_cast<std::uint64_t>(t));
        const SignalDraw draw = model.draw_signal(sinr_db, rng);
        for (const auto& a : draw.amplitudes) {
            acc += std::norm(a);
            ++count;
        }
    }
    CHECK(acc / count == doctest::Approx(sigma2).epsilon(0.03));
}

TEST_CASE("generate_dataset: H0 moments reproduce R") {
    const ScenarioConfig cfg = small_config();
    const ScenarioModel model(cfg);
    ComplexMatrix acc = ComplexMatrix::Zero(cfg.n, cfg.n);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        RngStream rng(19, static_cast<std::uint64_t>(t));
        const Dataset data = model.generate_dataset(Truth::H0, 0.0, rng);
        acc += data.z_p * data.z_p.adjoint();
    }
    acc /= static_cast<double>(trials) * cfg.k_p;
    CHECK((acc - model.covariance().mat()).norm() / model.covariance().mat().norm() <= 0.05);
}

TEST_CASE("generate_dataset: PHE secondary power ratio is gamma") {
    ScenarioConfig cfg = small_config();
    cfg.env = Environment::PHE;
    cfg.gamma = 2.0;
    const ScenarioModel model(cfg);
    double primary = 0.0;
    double secondary = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        RngStream rng(23, static_cast<std::uint64_t>(t));
        const Dataset data = model.generate_dataset(Truth::H0, 0.0, rng);
        primary += data.z_p.squaredNorm() / cfg.k_p;
        secondary += data.z_s.squaredNorm() / cfg.k_s;
    }
    CHECK(secondary / primary == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("generate_dataset: determinism and H0 independence of SINR") {
    const ScenarioConfig cfg = small_config();
    const ScenarioModel model(cfg);
    RngStream a(29, 5);
    RngStream b(29, 5);
    const Dataset da = model.generate_dataset(Truth::H1, 10.0, a);
    const Dataset db = model.generate_dataset(Truth::H1, 10.0, b);
    CHECK((da.z_p - db.z_p).cwiseAbs().maxCoeff() == 0.0);
    CHECK((da.z_s - db.z_s).cwiseAbs().maxCoeff() == 0.0);

    RngStream c(29, 6);
    RngStream d(29, 6);
    const Dataset h0_lo = model.generate_dataset(Truth::H0, -20.0, c);
    const Dataset h0_hi = model.generate_dataset(Truth::H0, 35.0, d);
    CHECK((h0_lo.z_p - h0_hi.z_p).cwiseAbs().maxCoeff() == 0.0);
    CHECK((h0_lo.z_s - h0_hi.z_s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scenario validation and hash binding") {
    ScenarioConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    const std::string base = scenario_hash(cfg);
    ScenarioConfig changed = cfg;
    changed.cnr_db = 20.0;
    CHECK(scenario_hash(changed) != base);
    changed = cfg;
    changed.env = Environment::PHE;
    CHECK(scenario_hash(changed) != base);
    CHECK(scenario_hash(cfg) == base);

    ScenarioConfig bad = cfg;
    bad.k_s = cfg.n - 1;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = cfg;
    bad.r = 0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = cfg;
    bad.rho_c = 1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}
