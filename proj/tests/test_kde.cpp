#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msamp/dataio.hpp"
#include "msamp/kde.hpp"
#include "msamp/normalize.hpp"
#include "oracles.hpp"

using namespace msamp;

namespace {

NormalizedData whitened(Index nu, Index n, std::uint64_t seed) {
    const DataMatrix x(oracle::gaussian(nu, n, seed) * 3.0);
    return normalize(x, fit_pca(x));
}

} // namespace

TEST_CASE("bandwidths match an independent evaluation") {
    for (Index nu : {1, 2, 3, 5, 32}) {
        for (Index n : {2, 20, 230, 400, 13056}) {
            CHECK(silverman_bandwidth(nu, n) == doctest::Approx(oracle::silverman(nu, n)).epsilon(1e-14));
            const double s = silverman_bandwidth(nu, n);
            CHECK(modified_bandwidth(s, n) == doctest::Approx(oracle::shrunk(nu, n)).epsilon(1e-14));
        }
    }
    // Values for the two-circles configuration (nu=2, N=230).
    CHECK(silverman_bandwidth(2, 230) == doctest::Approx(0.403998).epsilon(1e-5));
    CHECK(modified_bandwidth(silverman_bandwidth(2, 230), 230) ==
          doctest::Approx(0.375286).epsilon(1e-5));
    CHECK_THROWS_AS(silverman_bandwidth(0, 10), DataError);
    CHECK_THROWS_AS(silverman_bandwidth(2, 0), DataError);
}

TEST_CASE("bandwidth identity and monotonicity") {
    for (Index nu = 1; nu <= 8; ++nu) {
        double previous = 1e300;
        for (Index n = 1; n <= 5000; n = n * 3 + 1) {
            const double s = silverman_bandwidth(nu, n);
            const double h = modified_bandwidth(s, n);
            const double ratio = h / s;
            CHECK(std::abs(h * h + ratio * ratio * (n - 1.0) / n - 1.0) <= 1e-14);
            CHECK(s < previous);
            previous = s;
        }
    }
}

TEST_CASE("single-centre density") {
    for (Index nu : {1, 3}) {
        Matrix eta = Matrix::Zero(nu, 2);
        eta(0, 0) = 1.0;
        eta(0, 1) = -1.0;
        const KdeModel kde = KdeModel::fit(NormalizedData{eta});
        const double h = kde.modified_bandwidth();
        // Symmetric two-point mixture: density at the midpoint
        const double expected = -0.5 * nu * std::log(2 * std::numbers::pi * h * h) -
                                std::pow(kde.centers()(0, 0), 2) / (2 * h * h);
        CHECK(kde.log_density(Vector::Zero(nu)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("log density matches extended-precision summation") {
    const NormalizedData eta = whitened(3, 60, 4);
    const KdeModel kde = KdeModel::fit(eta);
    const Matrix points = oracle::gaussian(3, 25, 99) * 2.0;
    for (Index j = 0; j < points.cols(); ++j) {
        const Vector p = points.col(j);
        const double expected = static_cast<double>(
            oracle::mixture_log_density(eta.eta, kde.bandwidth(), kde.modified_bandwidth(), p));
        CHECK(kde.log_density(p) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("far points stay finite") {
    const NormalizedData eta = whitened(2, 40, 5);
    const KdeModel kde = KdeModel::fit(eta);
    for (double r : {1e3, 1e5, 1e6}) {
        const Vector p = Vector::Constant(2, r / std::sqrt(2.0));
        const double v = kde.log_density(p);
        CHECK(std::isfinite(v));
        CHECK(v < -1e5);
        Matrix u(2, 1);
        u.col(0) = p;
        const Matrix g = kde.potential_gradient(u);
        CHECK(all_finite(g));
        // Far away the force points back towards the data.
        CHECK(g.col(0).dot(p) < 0.0);
    }
}

TEST_CASE("gradient matches direct summation and finite differences") {
    for (const auto& [nu, n] : {std::pair<Index, Index>{2, 50}, {5, 200}, {1, 7}}) {
        const NormalizedData eta = whitened(nu, n, 11 + static_cast<std::uint64_t>(nu));
        const KdeModel kde = KdeModel::fit(eta);
        Matrix u = oracle::gaussian(nu, 300, 31) * 1.5;
        // Include points sitting exactly on centres.
        u.col(0) = kde.centers().col(0);
        u.col(1) = kde.centers().col(n - 1);
        const Matrix g = kde.potential_gradient(u);
        for (Index j = 0; j < u.cols(); ++j) {
            const Vector direct = oracle::mixture_log_gradient(eta.eta, kde.bandwidth(),
                                                               kde.modified_bandwidth(), u.col(j));
            CHECK((g.col(j) - direct).cwiseAbs().maxCoeff() <=
                  1e-10 * std::max(1.0, direct.norm()));
        }
        for (Index j = 0; j < 20; ++j) {
            const Vector fd = oracle::fd_gradient(
                [&](const Vector& p) { return kde.log_density(p); }, u.col(j), 1e-5);
            CHECK((g.col(j) - fd).cwiseAbs().maxCoeff() <= 1e-5);
        }
    }
}

TEST_CASE("gradient is column independent") {
    const NormalizedData eta = whitened(3, 80, 6);
    const KdeModel kde = KdeModel::fit(eta);
    const Matrix u = oracle::gaussian(3, 600, 12);
    const Matrix all = kde.potential_gradient(u);
    const Matrix tail = kde.potential_gradient(Matrix(u.rightCols(7)));
    CHECK((all.rightCols(7) - tail).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("truncated gradient agrees closely") {
    const NormalizedData eta = whitened(2, 150, 7);
    const KdeModel full = KdeModel::fit(eta);
    const KdeModel cut = KdeModel::fit(eta, KdeOptions{.truncate = true});
    const Matrix u = oracle::gaussian(2, 200, 13);
    CHECK((full.potential_gradient(u) - cut.potential_gradient(u)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("analytic moments") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Index nu = 1 + static_cast<Index>(seed % 4);
        const NormalizedData eta = whitened(nu, 10 + 13 * static_cast<Index>(seed), seed);
        const KdeMoments m = KdeModel::fit(eta).analytic_moments();
        CHECK(m.mean.cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((m.second_moment - Matrix::Identity(nu, nu)).norm() <= 1e-10);
    }

    SUBCASE("un-normalized input with covariance 2I") {
        // Columns +-1 on each axis: zero mean, covariance (N-1)^{-1} sum = 2I for N = 4... scaled.
        Matrix eta(2, 4);
        eta << 1, -1, 0, 0,  //
            0, 0, 1, -1;
        const double c = std::sqrt(2.0 * 3.0 / 2.0);
        eta *= c; // empirical covariance with 1/(N-1) is now 2I
        const KdeModel kde = KdeModel::fit(NormalizedData{eta});
        const double s = kde.bandwidth();
        const double h = kde.modified_bandwidth();
        const Matrix expected = (h * h + (h / s) * (h / s) * 3.0 / 4.0 * 2.0) * Matrix::Identity(2, 2);
        CHECK((kde.analytic_moments().second_moment - expected).norm() <= 1e-14);
    }

    SUBCASE("translation shifts the mean by the scaled offset") {
        NormalizedData eta = whitened(2, 30, 3);
        const Vector t = Vector::LinSpaced(2, 0.5, -2.0);
        const KdeModel base = KdeModel::fit(eta);
        eta.eta.colwise() += t;
        const KdeModel shifted = KdeModel::fit(eta);
        const double ratio = base.modified_bandwidth() / base.bandwidth();
        CHECK((shifted.analytic_moments().mean - base.analytic_moments().mean - ratio * t).norm() <=
              1e-13);
    }
}
