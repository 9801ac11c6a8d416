#include "pedcc/centroids.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "pedcc/errors.hpp"
#include "pedcc/rng.hpp"

namespace pedcc {

namespace {

void check_domain(int n_classes, int dim) {
    if (n_classes < 2)
        throw Error(errc::invalid_argument, "need at least 2 classes, got " + std::to_string(n_classes));
    if (dim < 2)
        throw Error(errc::invalid_argument, "need dim >= 2, got " + std::to_string(dim));
}

Eigen::MatrixXd normalized_rows(Eigen::MatrixXd m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).norm();
    return m;
}

}  // namespace

namespace detail {

double repulsive_energy(const Eigen::MatrixXd& rows) {
    double energy = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        for (Eigen::Index j = i + 1; j < rows.rows(); ++j)
            energy += 1.0 / (rows.row(i) - rows.row(j)).norm();
    return energy;
}

Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed) {
    auto engine = make_engine(seed, /*stream=*/0x726f74ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = gauss(engine);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

Eigen::MatrixXd riesz_descent(int n_classes, int dim, std::uint64_t seed,
                              int iterations, std::vector<double>* energy_trace) {
    auto engine = make_engine(seed, /*stream=*/0x726570ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd points(n_classes, dim);
    for (int r = 0; r < n_classes; ++r)
        for (int c = 0; c < dim; ++c) points(r, c) = gauss(engine);
    points = normalized_rows(std::move(points));

    double energy = repulsive_energy(points);
    if (energy_trace) energy_trace->push_back(energy);

    double step = 0.1;
    Eigen::MatrixXd grad(n_classes, dim);
    for (int it = 0; it < iterations; ++it) {
        grad.setZero();
        for (int i = 0; i < n_classes; ++i) {
            for (int j = i + 1; j < n_classes; ++j) {
                Eigen::RowVectorXd diff = points.row(i) - points.row(j);
                double dist = diff.norm();
                Eigen::RowVectorXd pull = diff / (dist * dist * dist);
                grad.row(i) -= pull;
                grad.row(j) += pull;
            }
        }

        double displacement = 0.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd candidate = normalized_rows(points - step * grad);
            double candidate_energy = repulsive_energy(candidate);
            if (candidate_energy <= energy) {
                displacement = (candidate - points).rowwise().norm().maxCoeff();
                points = std::move(candidate);
                energy = candidate_energy;
                step *= 1.2;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (energy_trace) energy_trace->push_back(energy);
        if (!accepted || displacement < 1e-9) break;
    }
    return points;
}

}  // namespace detail

CentroidSet simplex_centroids(int n_classes, int dim) {
    check_domain(n_classes, dim);
    if (n_classes > dim + 1)
        throw Error(errc::infeasible_simplex,
                    std::to_string(n_classes) + " classes do not fit a regular simplex in dim " +
                        std::to_string(dim));

    const int n = n_classes;
    // Rows of sqrt(n/(n-1)) * (I - J/n) are unit, pairwise cosine -1/(n-1),
    // and orthogonal to the all-ones direction.
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, -1.0 / n);
    a.diagonal().array() += 1.0;
    a *= std::sqrt(static_cast<double>(n) / (n - 1.0));

    // Householder reflection sending ones/sqrt(n) to e_n zeroes every row's
    // last coordinate; the first n-1 coordinates carry the simplex.
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    v(n - 1) -= 1.0;
    if (v.norm() > 1e-12) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / v.squaredNorm()) * (v * v.transpose());
        a = a * h.transpose();
    }

    CentroidSet out;
    out.n_classes = n;
    out.dim = dim;
    out.seed = 0;
    out.rows = Eigen::MatrixXd::Zero(n, dim);
    out.rows.leftCols(n - 1) = a.leftCols(n - 1);
    out.rows = normalized_rows(std::move(out.rows));
    return out;
}

CentroidSet generate_centroids(int n_classes, int dim, std::uint64_t seed,
                               int iterations, std::vector<double>* energy_trace) {
    check_domain(n_classes, dim);
    if (iterations < 1)
        throw Error(errc::invalid_argument, "iterations must be >= 1");

    CentroidSet out;
    out.n_classes = n_classes;
    out.dim = dim;
    out.seed = seed;
    if (n_classes <= dim + 1) {
        out.rows = simplex_centroids(n_classes, dim).rows * detail::random_orthogonal(dim, seed).transpose();
        if (energy_trace) energy_trace->push_back(detail::repulsive_energy(out.rows));
    } else {
        out.rows = detail::riesz_descent(n_classes, dim, seed, iterations, energy_trace);
    }
    return out;
}

CentroidStats centroid_stats(const CentroidSet& c) {
    CentroidStats stats;
    stats.max_cosine = -2.0;
    for (Eigen::Index i = 0; i < c.rows.rows(); ++i)
        for (Eigen::Index j = i + 1; j < c.rows.rows(); ++j)
            stats.max_cosine = std::max(stats.max_cosine, c.rows.row(i).dot(c.rows.row(j)));
    double clamped = std::clamp(stats.max_cosine, -1.0, 1.0);
    stats.min_angle_deg = std::acos(clamped) * 180.0 / std::numbers::pi;
    stats.row_sum_norm = c.rows.colwise().sum().norm();
    return stats;
}

void validate_centroids(const CentroidSet& c) {
    if (c.n_classes < 2 || c.dim < 2)
        throw Error(errc::invalid_argument, "centroid set needs n_classes >= 2 and dim >= 2");
    if (c.rows.rows() != c.n_classes || c.rows.cols() != c.dim)
        throw Error(errc::shape_mismatch, "centroid matrix does not match declared sizes");
    if (!c.rows.allFinite())
        throw Error(errc::nonfinite_data, "centroid matrix holds non-finite values");
    for (Eigen::Index i = 0; i < c.rows.rows(); ++i)
        if (std::abs(c.rows.row(i).norm() - 1.0) > 1e-6)
            throw Error(errc::invalid_argument,
                        "centroid row " + std::to_string(i) + " is not unit norm");
    for (Eigen::Index i = 0; i < c.rows.rows(); ++i)
        for (Eigen::Index j = i + 1; j < c.rows.rows(); ++j)
            if (c.rows.row(i).dot(c.rows.row(j)) >= 1.0 - 1e-6)
                throw Error(errc::invalid_argument,
                            "centroid rows " + std::to_string(i) + " and " + std::to_string(j) +
                                " coincide");
}

}  // namespace pedcc
