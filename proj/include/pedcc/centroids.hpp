#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace pedcc {

// N evenly-distributed unit vectors in M-dimensional feature space.
// The rows double as the frozen weights of a classification head and
// as the regression targets for latent features.
struct CentroidSet {
    Eigen::MatrixXd rows;  // n_classes x dim, unit rows
    int n_classes = 0;
    int dim = 0;
    std::uint64_t seed = 0;
};

struct CentroidStats {
    double min_angle_deg = 0.0;
    double max_cosine = 0.0;
    double row_sum_norm = 0.0;
};

// Regular simplex: all pairwise cosines equal -1/(n_classes - 1), rows
// sum to zero. Requires 2 <= n_classes <= dim + 1.
CentroidSet simplex_centroids(int n_classes, int dim);

// Evenly-distributed centroids for any feasible (n_classes, dim).
// When n_classes <= dim + 1 the exact simplex is used, rotated by a
// seeded random orthogonal transform. Otherwise the configuration is
// found by minimizing the sum of inverse pairwise distances on the
// sphere with backtracking projected gradient descent. Deterministic
// per seed. `energy_trace`, when given, receives the accepted energy
// after each iteration (non-increasing).
CentroidSet generate_centroids(int n_classes, int dim, std::uint64_t seed,
                               int iterations,
                               std::vector<double>* energy_trace = nullptr);

CentroidStats centroid_stats(const CentroidSet& c);

// Throws on any broken invariant: non-unit row, duplicate rows, bad sizes.
void validate_centroids(const CentroidSet& c);

namespace detail {

// Sum over pairs of 1/||c_i - c_j||.
double repulsive_energy(const Eigen::MatrixXd& rows);

// The descent path of generate_centroids, exposed so it can be checked
// against the simplex optimum independently of the shortcut.
Eigen::MatrixXd riesz_descent(int n_classes, int dim, std::uint64_t seed,
                              int iterations, std::vector<double>* energy_trace);

// Haar-ish random orthogonal matrix (QR of a seeded Gaussian matrix with
// sign-fixed diagonal).
Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed);

}  // namespace detail

}  // namespace pedcc
