#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "subdet/ep.hpp"

using namespace subdet;

namespace {

struct RandomInstance {
    ComplexMatrix z_p;
    ComplexMatrix z_s;
    ComplexMatrix h;
    int r;
};

RandomInstance random_instance(std::uint64_t stream, int n = 6, int k_p = 5, int k_s = 9,
                               int r = 2) {
    RngStream rng(505, stream);
    RandomInstance inst;
    inst.z_p = oracle::random_complex(n, k_p, rng);
    inst.z_s = oracle::random_complex(n, k_s, rng);
    inst.h = oracle::random_basis(n, r, rng);
    inst.r = r;
    return inst;
}

EpInput input_of(const RandomInstance& inst) {
    return EpInput(inst.z_p, inst.z_s, inst.h, inst.r);
}

/// Z_S giving an exactly-identity sample covariance: sqrt(K_S) * [I | 0].
ComplexMatrix identity_scm_secondary(int n, int k_s) {
    ComplexMatrix z_s = ComplexMatrix::Zero(n, k_s);
    z_s.leftCols(n) = std::sqrt(static_cast<double>(k_s)) * ComplexMatrix::Identity(n, n);
    return z_s;
}

}  // namespace

TEST_CASE("stat_ep_fo_ks_he: aligned signal with identity whitening") {
    const int n = 2;
    ComplexMatrix z_s = std::sqrt(2.0) * ComplexMatrix::Identity(2, 2);
    ComplexMatrix h = ComplexMatrix::Zero(n, 1);
    h(0, 0) = 1.0;
    ComplexMatrix z_p = ComplexMatrix::Zero(n, 1);
    z_p(0, 0) = 1.0;
    EpInput in(z_p, z_s, h, 1);
    CHECK(stat_ep_fo_ks_he(in) == doctest::Approx(1.0).epsilon(1e-12));

    // Orthogonal primary data projects to nothing.
    ComplexMatrix z_perp = ComplexMatrix::Zero(n, 1);
    z_perp(1, 0) = 1.0;
    EpInput in_perp(z_perp, z_s, h, 1);
    CHECK(std::abs(stat_ep_fo_ks_he(in_perp)) <= 1e-20);
}

TEST_CASE("stat_ep_fo_ks_he: equals the column-wise projected energy") {
    const RandomInstance inst = random_instance(1);
    EpInput in = input_of(inst);
    const double stat = stat_ep_fo_ks_he(in);

    const ComplexMatrix w =
        inv_sqrt(HermitianMatrix(inst.z_s * inst.z_s.adjoint() / 9.0)).mat();
    const ComplexMatrix h_s = w * inst.h;
    const ComplexMatrix p = h_s * (h_s.adjoint() * h_s).inverse() * h_s.adjoint();
    double by_columns = 0.0;
    for (int i = 0; i < 5; ++i) {
        by_columns += (p * (w * inst.z_p.col(i))).squaredNorm();
    }
    CHECK(stat == doctest::Approx(by_columns).epsilon(1e-10));
}

TEST_CASE("stat_ep_fo_ks_phe: orthogonal data, exact scale invariance, decomposition") {
    const int n = 4, k_s = 6;
    const ComplexMatrix z_s = identity_scm_secondary(n, k_s);
    ComplexMatrix h = ComplexMatrix::Zero(n, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    RngStream rng(506, 0);
    ComplexMatrix z_p = ComplexMatrix::Zero(n, 3);
    for (int j = 0; j < 3; ++j) {
        for (int i = 2; i < n; ++i) {
            z_p(i, j) = rng.complex_normal();
        }
    }
    EpInput in(z_p, z_s, h, 2);
    CHECK(stat_ep_fo_ks_phe(in) == doctest::Approx(1.0).epsilon(1e-10));

    const RandomInstance inst = random_instance(2);
    EpInput a = input_of(inst);
    // Power-of-two scaling is exactly homogeneous in floating point, so the
    // ratio cancels bitwise; generic factors cancel to rounding.
    EpInput b(4.0 * inst.z_p, inst.z_s, inst.h, inst.r);
    CHECK(stat_ep_fo_ks_phe(a) == stat_ep_fo_ks_phe(b));
    EpInput b3(3.0 * inst.z_p, inst.z_s, inst.h, inst.r);
    CHECK(stat_ep_fo_ks_phe(b3) == doctest::Approx(stat_ep_fo_ks_phe(a)).epsilon(1e-12));

    // Projector decomposition: numerator = EP-FO-KS-HE + denominator.
    EpInput c = input_of(inst);
    EpInput d = input_of(inst);
    const double phe = stat_ep_fo_ks_phe(c);
    const double he = stat_ep_fo_ks_he(d);
    const ComplexMatrix w =
        inv_sqrt(HermitianMatrix(inst.z_s * inst.z_s.adjoint() / 9.0)).mat();
    const double num = (w * inst.z_p).squaredNorm();
    const double den = num / phe;
    CHECK(he + den == doctest::Approx(num).epsilon(1e-10));
}

TEST_CASE("stat_ep_fo_us_he: full-rank sum, zero data, rank-1 trace") {
    RandomInstance inst = random_instance(3);
    inst.r = 6;  // r >= N sums every eigenvalue
    EpInput in = input_of(inst);
    const ComplexMatrix w =
        inv_sqrt(HermitianMatrix(inst.z_s * inst.z_s.adjoint() / 9.0)).mat();
    const double trace = (w * inst.z_p).squaredNorm();
    CHECK(stat_ep_fo_us_he(in) == doctest::Approx(trace).epsilon(1e-8));

    RandomInstance zero = random_instance(4);
    zero.z_p.setZero();
    EpInput zin = input_of(zero);
    CHECK(stat_ep_fo_us_he(zin) == 0.0);

    RandomInstance rank1 = random_instance(5);
    RngStream rng(507, 5);
    rank1.z_p = oracle::random_complex(6, 1, rng) * oracle::random_complex(5, 1, rng).adjoint();
    rank1.r = 1;
    EpInput r1 = input_of(rank1);
    EpInput r3(rank1.z_p, rank1.z_s, rank1.h, 3);
    CHECK(stat_ep_fo_us_he(r1) == doctest::Approx(stat_ep_fo_us_he(r3)).epsilon(1e-9));
}

TEST_CASE("stat_ep_fo_us_phe: rank ratio in (0, 1], exact invariances") {
    RandomInstance rank1 = random_instance(6);
    RngStream rng(508, 6);
    rank1.z_p = oracle::random_complex(6, 1, rng) * oracle::random_complex(5, 1, rng).adjoint();
    EpInput r1 = input_of(rank1);
    CHECK(stat_ep_fo_us_phe(r1) == doctest::Approx(1.0).epsilon(1e-12));

    const RandomInstance inst = random_instance(7);
    EpInput a = input_of(inst);
    EpInput b(0.0625 * inst.z_p, inst.z_s, inst.h, inst.r);
    CHECK(stat_ep_fo_us_phe(a) == stat_ep_fo_us_phe(b));
    EpInput b2(0.05 * inst.z_p, inst.z_s, inst.h, inst.r);
    CHECK(stat_ep_fo_us_phe(b2) == doctest::Approx(stat_ep_fo_us_phe(a)).epsilon(1e-12));
    EpInput c = input_of(inst);
    const double val = stat_ep_fo_us_phe(c);  // full-rank data, r < N
    CHECK(val > 0.0);
    CHECK(val < 1.0);

    RandomInstance zero = random_instance(8);
    zero.z_p.setZero();
    EpInput zin = input_of(zero);
    CHECK_THROWS_AS(stat_ep_fo_us_phe(zin), Error);
}

TEST_CASE("stat_ep_so_ks_he: hand case, orthogonal data, shrinkage-free zero") {
    const int n = 2;
    ComplexMatrix z_s = std::sqrt(2.0) * ComplexMatrix::Identity(n, n);
    ComplexMatrix h = ComplexMatrix::Zero(n, 1);
    h(0, 0) = 1.0;
    ComplexMatrix z_p = ComplexMatrix::Zero(n, 1);
    z_p(0, 0) = 1.0;
    EpInput in(z_p, z_s, h, 1);
    CHECK(std::abs(stat_ep_so_ks_he(in)) <= 1e-10);  // 1 - 0 - 1

    ComplexMatrix z_perp = ComplexMatrix::Zero(n, 1);
    z_perp(1, 0) = 1.0;
    EpInput in_perp(z_perp, z_s, h, 1);
    CHECK(std::abs(stat_ep_so_ks_he(in_perp)) <= 1e-12);

    // Small data keeps every eigenvalue of B below K_P: statistic collapses.
    RandomInstance inst = random_instance(9);
    inst.z_p *= 0.05;
    EpInput small = input_of(inst);
    CHECK(std::abs(stat_ep_so_ks_he(small)) <= 1e-10);
}

TEST_CASE("stat_ep_so_ks_he: positive once a mode exceeds the shrinkage knee") {
    RandomInstance inst = random_instance(10);
    inst.z_p *= 10.0;
    EpInput in = input_of(inst);
    CHECK(stat_ep_so_ks_he(in) > 0.0);
}

TEST_CASE("b eigenvalues match the projected outer-product spectrum") {
    const RandomInstance inst = random_instance(11);
    EpInput in = input_of(inst);
    const RealVector b_eigs = in.b_eigenvalues_desc();

    const ComplexMatrix w =
        inv_sqrt(HermitianMatrix(inst.z_s * inst.z_s.adjoint() / 9.0)).mat();
    const ComplexMatrix g = w * inst.h;
    const ComplexMatrix p = g * (g.adjoint() * g).inverse() * g.adjoint();
    const ComplexMatrix y = w * inst.z_p;
    const RealVector outer =
        hermitian_eig(HermitianMatrix(p * (y * y.adjoint()) * p)).values;
    const double scale = outer(outer.size() - 1);
    for (int i = 0; i < inst.r; ++i) {
        CHECK(std::abs(b_eigs(i) - outer(outer.size() - 1 - i)) <= 1e-8 * scale);
    }
    // Shrinkage list is nonincreasing along nonincreasing modes.
    for (int i = 1; i < inst.r; ++i) {
        CHECK(b_eigs(i) <= b_eigs(i - 1) + 1e-15);
    }
}

TEST_CASE("so_ks_scale_mle: rank-zero closed form and grid oracle") {
    CHECK(so_ks_scale_mle(6.0, {}, 3, 4) == doctest::Approx(0.5).epsilon(1e-12));

    RngStream rng(509, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + static_cast<int>(rng.index(5));
        const int k_p = 2 + static_cast<int>(rng.index(5));
        const int m = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        std::vector<double> eigs(m);
        for (double& e : eigs) {
            e = k_p * std::exp(2.5 * (rng.uniform01() - 0.3));
        }
        std::sort(eigs.begin(), eigs.end(), std::greater<double>());
        const double t_perp = (0.2 + 3.0 * rng.uniform01()) * k_p * (n - m);
        const double got = so_ks_scale_mle(t_perp, eigs, k_p, n);
        const double scale = (t_perp + std::accumulate(eigs.begin(), eigs.end(), 0.0)) /
                             (static_cast<double>(k_p) * n);
        const double expected = oracle::log_grid_maximize(
            [&](double g) { return oracle::so_ks_objective(t_perp, eigs, k_p, n, g); }, scale);
        CHECK(got == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("so_ks_scale_mle: quadratic scale equivariance") {
    const std::vector<double> eigs = {9.0, 4.0, 1.5};
    const double base = so_ks_scale_mle(3.0, eigs, 2, 6);
    const double c2 = 7.3;
    std::vector<double> scaled = eigs;
    for (double& e : scaled) e *= c2;
    CHECK(so_ks_scale_mle(3.0 * c2, scaled, 2, 6) == doctest::Approx(c2 * base).epsilon(1e-12));
}

TEST_CASE("stat_ep_so_ks_phe: rank-zero scale gives the white-noise MLE value") {
    const int n = 4, k_s = 6, k_p = 2;
    const ComplexMatrix z_s = identity_scm_secondary(n, k_s);
    ComplexMatrix h = ComplexMatrix::Zero(n, 1);
    h(0, 0) = 1.0;
    RngStream rng(510, 0);
    ComplexMatrix z_p = ComplexMatrix::Zero(n, k_p);
    for (int j = 0; j < k_p; ++j) {
        for (int i = 1; i < n; ++i) {
            z_p(i, j) = rng.complex_normal();
        }
    }
    EpInput in(z_p, z_s, h, 1);
    const double t = z_p.squaredNorm();  // whitening is exactly the identity
    const double gamma_hat = t / (static_cast<double>(k_p) * n);
    const double expected = k_p * n * std::log(t) - k_p * n * std::log(gamma_hat) - k_p * n;
    CHECK(stat_ep_so_ks_phe(in) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("stat_ep_so_ks_phe and stat_ep_so_us_phe: primary-only scale invariance") {
    const RandomInstance inst = random_instance(12);
    EpInput a1 = input_of(inst);
    EpInput a2(5.0 * inst.z_p, inst.z_s, inst.h, inst.r);
    CHECK(stat_ep_so_ks_phe(a2) == doctest::Approx(stat_ep_so_ks_phe(a1)).epsilon(1e-8));
    EpInput b1 = input_of(inst);
    EpInput b2(0.04 * inst.z_p, inst.z_s, inst.h, inst.r);
    CHECK(stat_ep_so_us_phe(b2) == doctest::Approx(stat_ep_so_us_phe(b1)).epsilon(1e-8));
}

TEST_CASE("stat_ep_so_us_he: collapse below the knee, single-mode contribution") {
    const int n = 4, k_s = 8, k_p = 3;
    const ComplexMatrix z_s = identity_scm_secondary(n, k_s);
    ComplexMatrix z_p = ComplexMatrix::Zero(n, k_p);
    for (int i = 0; i < k_p; ++i) {
        z_p(i, i) = std::sqrt(static_cast<double>(k_p));  // every nonzero mode exactly K_P
    }
    EpInput at_knee(z_p, z_s, std::nullopt, 2);
    CHECK(stat_ep_so_us_he(at_knee) == 0.0);

    EpInput below(0.5 * z_p, z_s, std::nullopt, 2);
    CHECK(stat_ep_so_us_he(below) == 0.0);

    ComplexMatrix one_hot = ComplexMatrix::Zero(n, k_p);
    one_hot(0, 0) = std::sqrt(2.0 * k_p);  // single mode at 2 K_P
    EpInput single(one_hot, z_s, std::nullopt, 2);
    const double expected = 2.0 * k_p - k_p * std::log(2.0) - k_p;
    CHECK(stat_ep_so_us_he(single) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("so_us_scale_mle: equal modes take the high branch") {
    const int n = 4, k_p = 6;
    const std::vector<double> sig(n, 3.7);  // r0 = N, all breakpoints coincide
    const double got = so_us_scale_mle(sig, k_p, n, n);
    CHECK(got == doctest::Approx(4 * 3.7 / (static_cast<double>(k_p) * n)).epsilon(1e-12));
}

TEST_CASE("so_us_scale_mle: grid oracle on both rank regimes") {
    RngStream rng(511, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + static_cast<int>(rng.index(5));
        const int k_p = 2 + static_cast<int>(rng.index(6));
        const int r0 = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n)));
        std::vector<double> sig(r0);
        for (double& s : sig) {
            s = k_p * std::exp(2.5 * (rng.uniform01() - 0.3));
        }
        std::sort(sig.begin(), sig.end(), std::greater<double>());
        const double scale = std::accumulate(sig.begin(), sig.end(), 0.0) /
                             (static_cast<double>(k_p) * n);

        // r >= r0: the profile has no interior stationary point (it grows
        // without bound toward 0 when r0 < N and plateaus below the smallest
        // breakpoint when r0 = N), so the estimate is the best breakpoint.
        const int r_small = r0 + static_cast<int>(rng.index(3));
        const double got_small = so_us_scale_mle(sig, k_p, n, r_small);
        if (!(r0 == n && sig.front() == sig.back())) {
            CHECK(got_small == doctest::Approx(sig.back() / k_p).epsilon(1e-12));
        }
        const double plateau =
            oracle::so_us_objective_small_rank(sig, k_p, n, sig.back() / k_p);
        CHECK(oracle::so_us_objective_small_rank(sig, k_p, n, got_small) ==
              doctest::Approx(plateau).epsilon(1e-9));

        if (r0 >= 2) {
            const int r_large = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(r0 - 1)));
            const double got_large = so_us_scale_mle(sig, k_p, n, r_large);
            const double want_large = oracle::log_grid_maximize(
                [&](double g) {
                    return oracle::so_us_objective_large_rank(sig, k_p, n, r_large, g);
                },
                scale);
            CHECK(got_large == doctest::Approx(want_large).epsilon(1e-6));
        }
    }
}

TEST_CASE("stat_ep_so_us_phe: rank-1 data with full r reduces to the hand value") {
    const int n = 4, k_s = 8, k_p = 3;
    const ComplexMatrix z_s = identity_scm_secondary(n, k_s);
    ComplexMatrix z_p = ComplexMatrix::Zero(n, k_p);
    z_p(0, 0) = 2.0;  // single whitened mode sigma^2 = 4
    EpInput in(z_p, z_s, std::nullopt, n);
    const double kp = k_p;
    const double expected = kp * n * std::log(kp) - kp;  // gamma_hat = sigma^2 / K_P
    CHECK(stat_ep_so_us_phe(in) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("ep statistics are invariant to secondary-column permutations") {
    const RandomInstance inst = random_instance(13);
    ComplexMatrix permuted = inst.z_s;
    permuted.col(1).swap(permuted.col(8));
    permuted.col(0).swap(permuted.col(4));
    EpInput a = input_of(inst);
    EpInput b(inst.z_p, permuted, inst.h, inst.r);
    CHECK(stat_ep_fo_ks_he(b) == doctest::Approx(stat_ep_fo_ks_he(a)).epsilon(1e-8));
    CHECK(stat_ep_so_ks_phe(b) == doctest::Approx(stat_ep_so_ks_phe(a)).epsilon(1e-8));
    CHECK(stat_ep_so_us_phe(b) == doctest::Approx(stat_ep_so_us_phe(a)).epsilon(1e-8));
}
