#include "msamp/diffmaps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace msamp {

Matrix kernel_matrix(const Matrix& eta, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DataError("epsilon must be positive");
    }
    const Index count = eta.cols();
    const double inv_four_eps = 0.25 / epsilon;
    Matrix kernel(count, count);
#pragma omp parallel for schedule(dynamic, 16)
    for (Index j = 0; j < count; ++j) {
        kernel(j, j) = 1.0;
        for (Index i = j + 1; i < count; ++i) {
            const double value = std::exp(-(eta.col(i) - eta.col(j)).squaredNorm() * inv_four_eps);
            kernel(i, j) = value;
        }
    }
    kernel.triangularView<Eigen::StrictlyUpper>() = kernel.transpose();
    return kernel;
}

Matrix transition_matrix(const Matrix& eta, double epsilon) {
    Matrix kernel = kernel_matrix(eta, epsilon);
    const Vector b = kernel.rowwise().sum();
    return b.cwiseInverse().asDiagonal() * kernel;
}

SpectralDecomposition decompose(const NormalizedData& eta, double epsilon, Index count) {
    const Index n = eta.samples();
    if (count < 1 || count > n) {
        throw DataError("requested " + std::to_string(count) + " eigenpairs but N = " +
                        std::to_string(n));
    }
    Matrix sym = kernel_matrix(eta.eta, epsilon);
    const Vector b = sym.rowwise().sum();
    const Vector b_inv_sqrt = b.cwiseSqrt().cwiseInverse();
    sym = b_inv_sqrt.asDiagonal() * sym * b_inv_sqrt.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericError("transition-matrix eigen-solver failed");
    }
    const Vector& values = solver.eigenvalues();

    // Descending by value; stable on ties.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index l, Index r) { return values(l) > values(r); });

    SpectralDecomposition out;
    out.epsilon = epsilon;
    out.b_diag = b;
    out.lambda.resize(count);
    out.psi.resize(n, count);
    for (Index k = 0; k < count; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.lambda(k) = values(src);
        Vector phi = solver.eigenvectors().col(src);
        // Sign: first nonzero component positive.
        for (Index i = 0; i < n; ++i) {
            if (phi(i) != 0.0) {
                if (phi(i) < 0.0) {
                    phi = -phi;
                }
                break;
            }
        }
        out.psi.col(k) = b_inv_sqrt.cwiseProduct(phi);
    }
    return out;
}

namespace {

// a = g (g^T g)^{-1}.  With g = G D (unit-norm columns G, D = diag of norms),
// a = G (G^T G)^{-1} D^{-1}; the thin QR G = QR then gives G (G^T G)^{-1} = Q R^{-T}.
Matrix pseudo_inverse_factor(const Matrix& g) {
    const Index rows = g.rows();
    const Index cols = g.cols();
    const Vector norms = g.colwise().norm().transpose();
    if (!(norms.minCoeff() > 0.0)) {
        throw NumericError("diffusion basis has a zero column");
    }
    const Matrix unit = g * norms.cwiseInverse().asDiagonal();
    Eigen::HouseholderQR<Matrix> qr(unit);
    const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-10)) {
        throw NumericError("diffusion basis is numerically rank deficient");
    }
    const Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Matrix a_t = r.triangularView<Eigen::Upper>().solve(q.transpose());
    return a_t.transpose() * norms.cwiseInverse().asDiagonal();
}

} // namespace

DiffusionBasis DiffusionBasis::from_spectrum(const SpectralDecomposition& spectrum, int kappa,
                                             Index m) {
    if (kappa < 0) {
        throw DataError("kappa must be non-negative");
    }
    if (m < 2 || m > spectrum.count()) {
        throw DataError("basis size m = " + std::to_string(m) + " outside [2, " +
                        std::to_string(spectrum.count()) + "]");
    }
    Matrix g = spectrum.psi.leftCols(m);
    if (kappa > 0) {
        for (Index k = 0; k < m; ++k) {
            const double lam = spectrum.lambda(k);
            if (!(lam > kMinBasisEigenvalue)) {
                throw NumericError("eigenvalue lambda_" + std::to_string(k + 1) + " = " +
                                   std::to_string(lam) +
                                   " is numerically zero; increase epsilon or reduce m");
            }
            g.col(k) *= std::pow(lam, kappa);
        }
    }
    DiffusionBasis basis = from_vectors(std::move(g), spectrum.lambda.head(m), spectrum.epsilon,
                                        kappa);
    basis.b_diag_ = spectrum.b_diag;
    return basis;
}

DiffusionBasis DiffusionBasis::from_vectors(Matrix g, Vector lambda, double epsilon, int kappa) {
    if (g.cols() < 1 || g.cols() > g.rows()) {
        throw DataError("basis must have between 1 and N columns");
    }
    DiffusionBasis basis;
    basis.epsilon_ = epsilon;
    basis.kappa_ = kappa;
    basis.lambda_ = std::move(lambda);
    basis.a_ = pseudo_inverse_factor(g);
    basis.g_ = std::move(g);
    return basis;
}

DiffusionBasis build_basis(const NormalizedData& eta, double epsilon, int kappa, Index m) {
    if (m > eta.samples()) {
        throw DataError("m = " + std::to_string(m) + " exceeds N = " +
                        std::to_string(eta.samples()));
    }
    if (m < 2) {
        throw DataError("m must be at least 2");
    }
    return DiffusionBasis::from_spectrum(decompose(eta, epsilon, m), kappa, m);
}

Vector spectrum(const NormalizedData& eta, double epsilon, Index m_max) {
    return decompose(eta, epsilon, m_max).lambda;
}

Matrix project(const Matrix& eta_like, const DiffusionBasis& basis) {
    if (eta_like.cols() != basis.samples()) {
        throw DataError("project: matrix has " + std::to_string(eta_like.cols()) +
                        " columns, basis expects " + std::to_string(basis.samples()));
    }
    return eta_like * basis.a();
}

double median_pairwise_sq_distance(const Matrix& eta) {
    const Index n = eta.cols();
    if (n < 2) {
        throw DataError("need at least two points");
    }
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i) {
            d.push_back((eta.col(i) - eta.col(j)).squaredNorm());
        }
    }
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

Index spectral_gap_index(const Vector& lambda) {
    Index best = 0;
    double best_drop = 0.0;
    for (Index k = 1; k + 1 < lambda.size(); ++k) {
        const double drop = lambda(k) - lambda(k + 1);
        if (drop > best_drop) {
            best_drop = drop;
            best = k + 1; // 1-based alpha
        }
    }
    return best;
}

} // namespace msamp
