#include <doctest.h>

#include "msamp/dataio.hpp"
#include "msamp/normalize.hpp"
#include "oracles.hpp"

using namespace msamp;

TEST_CASE("hand-computable 2x3 case") {
    Matrix x(2, 3);
    x << 1, -1, 0,  //
        0, 0, 0;
    const PcaModel pca = fit_pca(DataMatrix(x));
    CHECK(pca.mean.norm() == 0.0);
    REQUIRE(pca.rank() == 1);
    CHECK(pca.eigvals(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(pca.eigvecs(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(pca.eigvecs(1, 0)) < 1e-14);
    // sign convention: largest-magnitude component positive
    CHECK(pca.eigvecs(0, 0) > 0.0);

    const NormalizedData eta = normalize(DataMatrix(x), pca);
    CHECK(eta.dim() == 1);
    CHECK(eta.eta(0, 0) == doctest::Approx(1.0));
    CHECK(eta.eta(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("identity-covariance data is a fixed point up to sign and order") {
    // Rotated, whitened Gaussian sample has covariance exactly I after whitening.
    Matrix z = oracle::gaussian(3, 100, 8);
    z = z.colwise() - z.rowwise().mean();
    const Matrix cov = z * z.transpose() / 99.0;
    const Eigen::LLT<Matrix> llt(cov);
    const Matrix white = llt.matrixL().solve(z);
    const PcaModel pca = fit_pca(DataMatrix(white));
    CHECK(pca.rank() == 3);
    for (Index k = 0; k < 3; ++k) {
        CHECK(pca.eigvals(k) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("single repeated point is rejected") {
    Matrix x = Matrix::Constant(3, 5, 2.5);
    CHECK_THROWS_AS(fit_pca(DataMatrix(x)), NumericError);
}

TEST_CASE("two-circles data normalizes to nu = 2") {
    const DataMatrix x = synth_circles(230, {1.0, 2.0}, 0.02, 1);
    CHECK(fit_pca(x).rank() == 2);
}

TEST_CASE("normalization identities over random data") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const Index n = 2 + static_cast<Index>(seed % 5);
        const Index count = 20 + static_cast<Index>(seed * 7);
        const Matrix mix = oracle::gaussian(n, n, 100 + seed);
        const Matrix raw = mix * oracle::gaussian(n, count, seed) +
                           Vector::LinSpaced(n, -3.0, 5.0).replicate(1, count);
        const DataMatrix x(raw);
        const PcaModel pca = fit_pca(x);
        REQUIRE(pca.rank() == n);

        const Matrix ortho = pca.eigvecs.transpose() * pca.eigvecs;
        CHECK((ortho - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
        for (Index k = 1; k < n; ++k) {
            CHECK(pca.eigvals(k - 1) >= pca.eigvals(k));
        }

        const auto [mean, cov] = empirical_moments(raw);
        const double mu_max = pca.eigvals(0);
        for (Index k = 0; k < n; ++k) {
            const double residual =
                (cov * pca.eigvecs.col(k) - pca.eigvals(k) * pca.eigvecs.col(k)).norm();
            CHECK(residual <= 1e-8 * mu_max);
        }

        const NormalizedData eta = normalize(x, pca);
        const auto [m_eta, c_eta] = empirical_moments(eta.eta);
        CHECK(m_eta.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((c_eta - Matrix::Identity(n, n)).norm() <= 1e-8);

        const Matrix back = denormalize(eta.eta, pca);
        CHECK((back - raw).norm() / raw.norm() <= 1e-10);
    }
}

TEST_CASE("reduced-rank round trip equals the projection onto the retained eigenspace") {
    // Third feature is an exact combination of the first two.
    Matrix raw(3, 60);
    raw.topRows(2) = oracle::gaussian(2, 60, 21);
    raw.row(2) = 2.0 * raw.row(0) - 0.5 * raw.row(1);
    raw.array() += 1.0;
    const DataMatrix x(raw);
    const PcaModel pca = fit_pca(x);
    REQUIRE(pca.rank() == 2);
    const NormalizedData eta = normalize(x, pca);
    CHECK(eta.dim() == 2);

    // Independent projector onto the column space of the centred data.
    const Vector mean = raw.rowwise().mean();
    const Matrix centered = raw.colwise() - mean;
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
    const Matrix u = svd.matrixU().leftCols(2);
    const Matrix expected = (u * u.transpose() * centered).colwise() + mean;
    CHECK((denormalize(eta.eta, pca) - expected).norm() / expected.norm() <= 1e-10);
}

TEST_CASE("denormalize of zero returns the mean") {
    const DataMatrix x(oracle::gaussian(3, 30, 2));
    const PcaModel pca = fit_pca(x);
    const Matrix back = denormalize(Matrix::Zero(pca.rank(), 4), pca);
    for (Index j = 0; j < 4; ++j) {
        CHECK((back.col(j) - pca.mean).norm() <= 1e-15);
    }
    CHECK(denormalize(Matrix::Zero(pca.rank(), 0), pca).cols() == 0);
}

TEST_CASE("dimension mismatches") {
    const DataMatrix x(oracle::gaussian(3, 30, 2));
    const PcaModel pca = fit_pca(x);
    CHECK_THROWS_AS(normalize(DataMatrix(oracle::gaussian(2, 30, 2)), pca), DataError);
    CHECK_THROWS_AS(denormalize(Matrix::Zero(2, 3), pca), DataError);
}
