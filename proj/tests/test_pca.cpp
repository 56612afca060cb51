#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sansum/pca.hpp"
#include "test_util.hpp"

using namespace sansum;
using Catch::Matchers::WithinAbs;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 5.0) {
    sansum::SplitMix64 rng(seed);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.next_signed_unit() * scale;
    return x;
}

double total_variance(const Matrix& x) {
    const auto mean = x.col_means();
    double tv = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double d = x(i, j) - mean[j];
            s += d * d;
        }
        tv += s / static_cast<double>(x.rows() - 1);
    }
    return tv;
}

void check_model_invariants(const PCAModel& model) {
    const std::size_t q = model.output_dim();
    for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t b = a; b < q; ++b) {
            const double dot = vec::dot(model.components.row(a), model.components.row(b));
            CHECK_THAT(dot, WithinAbs(a == b ? 1.0 : 0.0, 1e-6));
        }
    }
    for (std::size_t k = 0; k + 1 < q; ++k)
        CHECK(model.explained_variance[k] >= model.explained_variance[k + 1] - 1e-12);
    for (double ev : model.explained_variance) CHECK(ev >= 0.0);
}

}  // namespace

TEST_CASE("collinear points have one direction of variance") {
    const Matrix x = Matrix::from_rows({{0, 0}, {1, 1}, {2, 2}});
    const PCAModel model = pca_fit(x, 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK_THAT(model.components(0, 0), WithinAbs(inv_sqrt2, 1e-9));
    CHECK_THAT(model.components(0, 1), WithinAbs(inv_sqrt2, 1e-9));
    CHECK_THAT(model.explained_variance[0] / total_variance(x), WithinAbs(1.0, 1e-9));

    const Matrix y = pca_transform(model, x);
    CHECK_THAT(y(0, 0), WithinAbs(-std::sqrt(2.0), 1e-9));
    CHECK_THAT(y(1, 0), WithinAbs(0.0, 1e-9));
    CHECK_THAT(y(2, 0), WithinAbs(std::sqrt(2.0), 1e-9));
}

TEST_CASE("hand-computed 2x2 eigenproblem") {
    // covariance is diag(1, 1/300); the top component is exactly (1, 0)
    const Matrix x = Matrix::from_rows({{1, 0}, {-1, 0}, {0, 0.1}});
    const PCAModel model = pca_fit(x, 1);
    CHECK_THAT(model.components(0, 0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(model.components(0, 1), WithinAbs(0.0, 1e-12));
    CHECK_THAT(model.explained_variance[0], WithinAbs(1.0, 1e-12));
}

TEST_CASE("transforming the mean gives the zero vector") {
    const Matrix x = random_matrix(6, 3, 11);
    const PCAModel model = pca_fit(x, 2);
    Matrix mean_row(1, 3);
    for (std::size_t j = 0; j < 3; ++j) mean_row(0, j) = model.mean[j];
    const Matrix y = pca_transform(model, mean_row);
    for (std::size_t k = 0; k < 2; ++k) CHECK_THAT(y(0, k), WithinAbs(0.0, 1e-12));
}

TEST_CASE("full-rank transform preserves pairwise distances") {
    const Matrix x = random_matrix(10, 3, 21);
    const PCAModel model = pca_fit(x, 3);  // q = d = 3, n - 1 = 9 >= 3
    const Matrix y = pca_transform(model, x);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            const double dx = std::sqrt(vec::squared_distance(x.row(i), x.row(j)));
            const double dy = std::sqrt(vec::squared_distance(y.row(i), y.row(j)));
            CHECK_THAT(dy, WithinAbs(dx, 1e-6));
        }
}

TEST_CASE("full-rank reconstruction reproduces the centered data") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 3 + seed % 8;
        const std::size_t d = 2 + seed % 5;
        const Matrix x = random_matrix(n, d, 100 + seed);
        const std::size_t q = std::min(n - 1, d);
        const PCAModel model = pca_fit(x, q);
        const Matrix y = pca_transform(model, x);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double lifted = 0.0;
                for (std::size_t k = 0; k < q; ++k) lifted += y(i, k) * model.components(k, j);
                CHECK_THAT(lifted, WithinAbs(x(i, j) - model.mean[j], 1e-6));
            }
    }
}

TEST_CASE("component orthonormality, eigenvalue order, trace preservation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        // alternate between the covariance (n > d) and Gram (n <= d) routes
        const std::size_t n = seed % 2 == 0 ? 12 : 4;
        const std::size_t d = seed % 2 == 0 ? 4 : 9;
        const Matrix x = random_matrix(n, d, 200 + seed);
        const std::size_t q = std::min(n - 1, d);
        const PCAModel model = pca_fit(x, q);
        check_model_invariants(model);

        double ev_sum = 0.0;
        for (double ev : model.explained_variance) ev_sum += ev;
        CHECK_THAT(ev_sum, WithinAbs(total_variance(x), 1e-6));
    }
}

TEST_CASE("transform is linear in deviations from the mean") {
    const Matrix x = random_matrix(8, 4, 33);
    const PCAModel model = pca_fit(x, 3);
    const auto& mean = model.mean;

    sansum::SplitMix64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const double alpha = rng.next_signed_unit() * 2.0;
        const double beta = rng.next_signed_unit() * 2.0;
        Matrix probe(3, 4);
        for (std::size_t j = 0; j < 4; ++j) {
            const double du = x(0, j) - mean[j];
            const double dv = x(1, j) - mean[j];
            probe(0, j) = mean[j] + du;
            probe(1, j) = mean[j] + dv;
            probe(2, j) = mean[j] + alpha * du + beta * dv;
        }
        const Matrix y = pca_transform(model, probe);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK_THAT(y(2, k), WithinAbs(alpha * y(0, k) + beta * y(1, k), 1e-9));
    }
}

TEST_CASE("zero-variance data yields zero eigenvalues and an orthonormal basis") {
    const Matrix x = Matrix::from_rows({{3, 1, 4}, {3, 1, 4}, {3, 1, 4}, {3, 1, 4}});
    const PCAModel model = pca_fit(x, 2);
    check_model_invariants(model);
    CHECK_THAT(model.explained_variance[0], WithinAbs(0.0, 1e-12));
    const Matrix y = pca_transform(model, x);
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t k = 0; k < y.cols(); ++k) CHECK_THAT(y(i, k), WithinAbs(0.0, 1e-9));
}

TEST_CASE("pca argument errors") {
    const Matrix one_row = Matrix::from_rows({{1, 2}});
    CHECK_THROWS_AS(pca_fit(one_row, 1), InsufficientDataError);

    const Matrix x = random_matrix(4, 3, 1);
    CHECK_THROWS_AS(pca_fit(x, 0), ArgumentError);
    CHECK_THROWS_AS(pca_fit(x, 4), ArgumentError);  // q > min(n-1, d) = 3

    const PCAModel model = pca_fit(x, 2);
    const Matrix wrong = random_matrix(2, 5, 2);
    CHECK_THROWS_AS(pca_transform(model, wrong), DimensionError);
}

TEST_CASE("model TSV round-trip") {
    testutil::TempDir tmp("pca");
    const Matrix x = random_matrix(7, 4, 55);
    const PCAModel model = pca_fit(x, 3);
    const auto path = tmp.path() / "model.tsv";
    pca_save_tsv(model, path);
    const PCAModel loaded = pca_load_tsv(path);
    CHECK(loaded.mean == model.mean);
    CHECK(loaded.explained_variance == model.explained_variance);
    CHECK(loaded.components.data() == model.components.data());
}
