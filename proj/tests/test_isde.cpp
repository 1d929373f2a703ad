#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msamp/dataio.hpp"
#include "msamp/diffmaps.hpp"
#include "msamp/isde.hpp"
#include "msamp/kde.hpp"
#include "msamp/normalize.hpp"
#include "oracles.hpp"

using namespace msamp;

namespace {

NormalizedData whitened(Index nu, Index n, std::uint64_t seed) {
    const DataMatrix x(oracle::gaussian(nu, n, seed));
    return normalize(x, fit_pca(x));
}

IsdeRunConfig config_for(double dr, double f0, Index m0, Index n_mc, std::uint64_t seed) {
    IsdeRunConfig c;
    c.delta_r = dr;
    c.f0 = f0;
    c.m0 = m0;
    c.n_mc = n_mc;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("step size and sampling interval") {
    const double h2 = modified_bandwidth(silverman_bandwidth(2, 230), 230);
    const double h3 = modified_bandwidth(silverman_bandwidth(3, 400), 400);
    const double h32 = modified_bandwidth(silverman_bandwidth(32, 13056), 13056);
    CHECK(derive_step(h2, 20) == doctest::Approx(0.1179).epsilon(5e-4 / 0.1179));
    CHECK(derive_step(h3, 20) == doctest::Approx(0.1196).epsilon(5e-4 / 0.1196));
    CHECK(derive_step(h32, 60) == doctest::Approx(0.06142).epsilon(5e-4 / 0.06142));
    CHECK(min_m0(1.5, 20, h2) == 105);
    CHECK(min_m0(1.5, 60, h32) == 200);
    CHECK_THROWS_AS(derive_step(h2, 1.0), DataError);
    CHECK_THROWS_AS(min_m0(0.0, 20, h2), DataError);

    const IsdeRunConfig c = IsdeRunConfig::derived(h2, 1.5, 20, 110, 40, 1);
    CHECK(c.total_steps() == 4400);
    CHECK_NOTHROW(c.validate());
    IsdeRunConfig bad = c;
    bad.m0 = 0;
    CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("flat potential without noise keeps the state fixed") {
    const DriftField flat = [](const Matrix& u, Matrix& out) { out = Matrix::Zero(u.rows(), u.cols()); };
    IsdeState state{oracle::gaussian(2, 5, 1), Matrix::Zero(2, 5), 0};
    const IsdeRunConfig c = config_for(0.1, 1.5, 1, 1, 0);
    for (int i = 0; i < 10; ++i) {
        const IsdeState next = verlet_step(state, flat, IdentityBasis{}, c, Matrix::Zero(2, 5));
        CHECK(next.z == state.z);
        CHECK(next.y.isZero(0.0));
        CHECK(next.step_index == state.step_index + 1);
        state = next;
    }
}

TEST_CASE("one step matches the update formulas written out") {
    const NormalizedData eta = whitened(2, 30, 3);
    const KdeModel kde = KdeModel::fit(eta);
    const DiffusionBasis basis = build_basis(eta, 1.0, 1, 4);
    const IsdeRunConfig c = config_for(0.1, 1.5, 1, 1, 0);
    IsdeState s{oracle::gaussian(2, 4, 5), oracle::gaussian(2, 4, 6), 0};
    const Matrix noise = oracle::gaussian(2, 30, 7) * std::sqrt(c.delta_r);
    const IsdeState next = verlet_step(s, kde, std::cref(basis), c, noise);

    const double b = c.f0 * c.delta_r / 4.0;
    const Matrix zh = s.z + c.delta_r / 2 * s.y;
    Matrix force(2, 30);
    const Matrix lifted = zh * basis.g().transpose();
    for (Index j = 0; j < 30; ++j) {
        force.col(j) = oracle::mixture_log_gradient(eta.eta, kde.bandwidth(),
                                                    kde.modified_bandwidth(), lifted.col(j));
    }
    const Matrix y = (1 - b) / (1 + b) * s.y + c.delta_r / (1 + b) * force * basis.a() +
                     std::sqrt(c.f0) / (1 + b) * noise * basis.a();
    const Matrix z = zh + c.delta_r / 2 * y;
    CHECK((next.y - y).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((next.z - z).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("deterministic core is reversible") {
    const NormalizedData eta = whitened(2, 25, 8);
    const KdeModel kde = KdeModel::fit(eta);
    const IsdeRunConfig c = config_for(derive_step(kde.modified_bandwidth(), 20), 1.0, 1, 1, 0);
    IsdeRunConfig undamped = c;
    undamped.f0 = 0.0;
    IsdeState s{eta.eta, oracle::gaussian(2, 25, 9), 0};
    const IsdeState start = s;
    const Matrix zero = Matrix::Zero(2, 25);
    for (int i = 0; i < 200; ++i) {
        s = verlet_step(s, kde, IdentityBasis{}, undamped, zero);
    }
    s.y = -s.y;
    for (int i = 0; i < 200; ++i) {
        s = verlet_step(s, kde, IdentityBasis{}, undamped, zero);
    }
    CHECK((s.z - start.z).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((s.y + start.y).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("wiener increments have variance delta_r") {
    // Chi-square test on the pooled sample variance at the 1% level.
    const IsdeRunConfig c = config_for(0.1179, 1.5, 1, 1, 21);
    const Matrix w = wiener_increment(c, 2, 5000, 3);
    const double n = static_cast<double>(w.size());
    const double stat = w.squaredNorm() / c.delta_r; // ~ chi2(n), mean known to be 0
    // Normal approximation of chi2(n): two-sided 1% critical value 2.5758.
    CHECK(std::abs(stat - n) / std::sqrt(2 * n) < 2.5758);
    CHECK(wiener_increment(c, 2, 5000, 3) == w);
    CHECK(wiener_increment(c, 2, 5000, 4) != w);
}

TEST_CASE("run shape and determinism") {
    const NormalizedData eta = whitened(2, 40, 10);
    const KdeModel kde = KdeModel::fit(eta);
    const DiffusionBasis basis = build_basis(eta, 1.0, 1, 5);
    const IsdeRunConfig c = IsdeRunConfig::derived(kde.modified_bandwidth(), 1.5, 20, 7, 4, 3);
    const auto a = run(eta, kde, std::cref(basis), c);
    const auto b = run(eta, kde, std::cref(basis), c);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rows() == 2);
        CHECK(a[i].cols() == 40);
        CHECK(a[i] == b[i]);
        // Retained samples lie in the row space spanned by g.
        CHECK((a[i] * basis.projector() - a[i]).cwiseAbs().maxCoeff() <= 1e-9);
    }
    IsdeRunConfig other = c;
    other.seed = 4;
    CHECK(run(eta, kde, std::cref(basis), other)[0] != a[0]);
    other = c;
    other.chain = 1;
    CHECK(run(eta, kde, std::cref(basis), other)[0] != a[0]);

    other = c;
    other.n_mc = 0;
    CHECK(run(eta, kde, std::cref(basis), other).empty());
}

TEST_CASE("basis rescaling and kappa leave trajectories unchanged") {
    const NormalizedData eta = whitened(2, 50, 11);
    const KdeModel kde = KdeModel::fit(eta);
    const SpectralDecomposition sd = decompose(eta, 1.0, 6);
    const DiffusionBasis b1 = DiffusionBasis::from_spectrum(sd, 1, 6);
    const DiffusionBasis b0 = DiffusionBasis::from_spectrum(sd, 0, 6);
    const Vector scales = (oracle::uniform(6, 1, 8).array() * 5.0 + 0.2).matrix();
    const DiffusionBasis bs = DiffusionBasis::from_vectors(b1.g() * scales.asDiagonal());
    const IsdeRunConfig c = IsdeRunConfig::derived(kde.modified_bandwidth(), 1.5, 20, 5, 3, 9);
    const auto r1 = run(eta, kde, std::cref(b1), c);
    const auto r0 = run(eta, kde, std::cref(b0), c);
    const auto rs = run(eta, kde, std::cref(bs), c);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK((r0[i] - r1[i]).norm() <= 1e-8 * r1[i].norm());
        CHECK((rs[i] - r1[i]).norm() <= 1e-8 * r1[i].norm());
    }
}

TEST_CASE("divergence is reported with the step index") {
    const DriftField explode = [](const Matrix& u, Matrix& out) { out = u * 1e200; };
    IsdeState s{Matrix::Ones(1, 2), Matrix::Ones(1, 2), 0};
    const IsdeRunConfig c = config_for(1.0, 1.5, 1, 1, 0);
    s = verlet_step(s, explode, IdentityBasis{}, c, Matrix::Zero(1, 2));
    try {
        verlet_step(s, explode, IdentityBasis{}, c, Matrix::Zero(1, 2));
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("step 2") != std::string::npos);
    }
}

TEST_CASE("shape errors") {
    const NormalizedData eta = whitened(2, 20, 12);
    const KdeModel kde = KdeModel::fit(eta);
    const IsdeRunConfig c = config_for(0.1, 1.5, 1, 1, 0);
    IsdeState s{Matrix::Zero(2, 20), Matrix::Zero(2, 20), 0};
    CHECK_THROWS_AS(verlet_step(s, kde, IdentityBasis{}, c, Matrix::Zero(2, 19)), DataError);
    const NormalizedData other = whitened(2, 21, 13);
    CHECK_THROWS_AS(run(other, kde, IdentityBasis{}, c), DataError);
}
