#include <cmath>
#include <vector>

#include "doctest.h"
#include "pedcc/centroids.hpp"
#include "pedcc/errors.hpp"

using namespace pedcc;

namespace {

// Independent all-pairs scan, kept deliberately dumb.
double brute_force_max_cosine(const Eigen::MatrixXd& rows) {
    double best = -2.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
            const double c = rows.row(i).dot(rows.row(j)) /
                             (rows.row(i).norm() * rows.row(j).norm());
            if (c > best) best = c;
        }
    return best;
}

}  // namespace

TEST_CASE("two classes give an antipodal pair") {
    const CentroidSet c = simplex_centroids(2, 5);
    REQUIRE(c.rows.rows() == 2);
    REQUIRE(c.rows.cols() == 5);
    CHECK(c.rows.row(0).dot(c.rows.row(1)) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(c.rows.row(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.rows.row(1).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("three classes in the plane sit at mutual 120 degrees") {
    const CentroidSet c = simplex_centroids(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            CHECK(c.rows.row(i).dot(c.rows.row(j)) == doctest::Approx(-0.5).epsilon(1e-12));
    const CentroidStats stats = centroid_stats(c);
    CHECK(stats.min_angle_deg == doctest::Approx(120.0).epsilon(1e-9));
}

TEST_CASE("four classes in three dimensions form a regular tetrahedron") {
    const CentroidSet c = simplex_centroids(4, 3);
    int pairs = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j, ++pairs)
            CHECK(c.rows.row(i).dot(c.rows.row(j)) ==
                  doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(pairs == 6);
}

TEST_CASE("simplex rows are unit and sum to zero") {
    for (auto [n, dim] : std::vector<std::pair<int, int>>{{2, 2}, {3, 7}, {5, 4}, {9, 8}}) {
        const CentroidSet c = simplex_centroids(n, dim);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(c.rows.row(i).norm() - 1.0) <= 1e-6);
        CHECK(c.rows.colwise().sum().norm() <= 1e-6);
        CHECK_NOTHROW(validate_centroids(c));
    }
}

TEST_CASE("simplex construction rejects infeasible sizes") {
    CHECK_THROWS_AS(simplex_centroids(5, 3), Error);
    try {
        simplex_centroids(5, 3);
    } catch (const Error& e) {
        CHECK(e.code() == errc::infeasible_simplex);
    }
    CHECK_THROWS_AS(simplex_centroids(1, 4), Error);
    try {
        simplex_centroids(1, 4);
    } catch (const Error& e) {
        CHECK(e.code() == errc::invalid_argument);
    }
}

TEST_CASE("generated antipodal pair reaches the optimum") {
    const CentroidSet c = generate_centroids(2, 3, /*seed=*/1, /*iterations=*/500);
    CHECK(c.rows.row(0).dot(c.rows.row(1)) <= -1.0 + 1e-3);
}

TEST_CASE("ten classes in 512 dimensions reach the simplex bound") {
    const CentroidSet c = generate_centroids(10, 512, /*seed=*/0, /*iterations=*/2000);
    CHECK(brute_force_max_cosine(c.rows) <= -1.0 / 9.0 + 1e-3);
    CHECK_NOTHROW(validate_centroids(c));
}

TEST_CASE("a hundred classes in 64 dimensions stay unit and deterministic") {
    const CentroidSet a = generate_centroids(100, 64, /*seed=*/0, /*iterations=*/2000);
    for (int i = 0; i < 100; ++i)
        CHECK(std::abs(a.rows.row(i).norm() - 1.0) <= 1e-6);
    const CentroidSet b = generate_centroids(100, 64, /*seed=*/0, /*iterations=*/2000);
    CHECK(a.rows == b.rows);  // bit-identical
}

TEST_CASE("generation is deterministic and seed-sensitive on the simplex path") {
    const CentroidSet a = generate_centroids(6, 9, 42, 100);
    const CentroidSet b = generate_centroids(6, 9, 42, 100);
    const CentroidSet c = generate_centroids(6, 9, 43, 100);
    CHECK(a.rows == b.rows);
    CHECK(a.rows != c.rows);
}

TEST_CASE("the repulsive-energy trace never increases") {
    std::vector<double> trace;
    // n > dim + 1 forces the descent path rather than the analytic shortcut.
    const CentroidSet c = generate_centroids(12, 4, /*seed=*/7, /*iterations=*/300, &trace);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] <= trace[i - 1] + 1e-12);
    CHECK_NOTHROW(validate_centroids(c));
}

TEST_CASE("descent approaches the simplex optimum without the shortcut") {
    // Feasible geometry solved the hard way must land near -1/(n-1) too.
    const Eigen::MatrixXd rows = detail::riesz_descent(4, 3, /*seed=*/3, /*iterations=*/4000, nullptr);
    CHECK(brute_force_max_cosine(rows) <= -1.0 / 3.0 + 1e-3);
}

TEST_CASE("stats match a brute-force scan on a random valid set") {
    const CentroidSet c = generate_centroids(17, 6, /*seed=*/11, /*iterations=*/400);
    const CentroidStats stats = centroid_stats(c);
    const double max_cos = brute_force_max_cosine(c.rows);
    CHECK(stats.max_cosine == doctest::Approx(max_cos).epsilon(1e-12));
    CHECK(stats.min_angle_deg ==
          doctest::Approx(std::acos(max_cos) * 180.0 / M_PI).epsilon(1e-9));
    CHECK(stats.row_sum_norm == doctest::Approx(c.rows.colwise().sum().norm()).epsilon(1e-12));
}

TEST_CASE("antipodal stats report a 180 degree minimum angle") {
    CHECK(centroid_stats(simplex_centroids(2, 8)).min_angle_deg ==
          doctest::Approx(180.0).epsilon(1e-9));
}

TEST_CASE("generate_centroids validates its arguments") {
    CHECK_THROWS_AS(generate_centroids(1, 8, 0, 10), Error);
    CHECK_THROWS_AS(generate_centroids(4, 1, 0, 10), Error);
    CHECK_THROWS_AS(generate_centroids(4, 8, 0, 0), Error);
}

TEST_CASE("validate_centroids rejects broken sets") {
    CentroidSet c = simplex_centroids(3, 4);
    c.rows(0, 0) += 0.1;  // breaks the unit norm
    CHECK_THROWS_AS(validate_centroids(c), Error);

    CentroidSet dup = simplex_centroids(3, 4);
    dup.rows.row(1) = dup.rows.row(0);
    CHECK_THROWS_AS(validate_centroids(dup), Error);
}

TEST_CASE("random orthogonal transforms preserve the Gram matrix") {
    const Eigen::MatrixXd q = detail::random_orthogonal(8, 21);
    CHECK((q * q.transpose() - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-12);
    const CentroidSet c = generate_centroids(5, 8, 21, 10);
    const CentroidSet plain = simplex_centroids(5, 8);
    // Rotation must not change pairwise similarities.
    const Eigen::MatrixXd g1 = c.rows * c.rows.transpose();
    const Eigen::MatrixXd g2 = plain.rows * plain.rows.transpose();
    CHECK((g1 - g2).cwiseAbs().maxCoeff() <= 1e-9);
}
