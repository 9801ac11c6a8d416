#pragma once

#include <Eigen/Core>
#include <vector>

#include "pedcc/centroids.hpp"

namespace pedcc {

// s: scale on cosine logits; m: additive margin on the true class,
// in [0, 1); n: root exponent on the center-regression term, >= 1.
struct LossConfig {
    double s = 10.0;
    double m = 0.35;
    double n = 2.0;
};

void validate_loss_config(const LossConfig& cfg);

struct LossValue {
    double total = 0.0;
    double am_component = 0.0;
    double mse_component_raw = 0.0;        // pre-root
    Eigen::MatrixXd grad_wrt_features;     // B x M, w.r.t. raw latent features
};

// cos(theta) between each normalized feature row and each centroid row.
Eigen::MatrixXd cosine_logits(const Eigen::MatrixXd& features, const CentroidSet& centers);

struct AmSoftmaxResult {
    double loss = 0.0;
    Eigen::MatrixXd grad_wrt_logits;  // B x N
};

// Batch-mean additive-margin softmax over scaled cosine logits: the true
// class logit is reduced by the margin before scaling. Computed with
// max-subtraction so large scales stay finite.
AmSoftmaxResult am_softmax_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                                const LossConfig& cfg);

struct MseCenterResult {
    double loss = 0.0;                  // (1/2) sum_i ||x_i - c_{y_i}||^2
    Eigen::VectorXd per_sample;         // (1/2) ||x_i - c_{y_i}||^2, equals 1 - cos for unit rows
    Eigen::MatrixXd grad_wrt_features;  // x_i - c_{y_i}
};

// Expects rows already normalized; for unit inputs each per-sample value
// equals 1 - cos(theta) exactly.
MseCenterResult mse_center_loss(const Eigen::MatrixXd& normalized_features,
                                const std::vector<int>& labels, const CentroidSet& centers);

// total = am + (mse_raw)^(1/n), with the gradient taken w.r.t. the raw
// (unnormalized) features. The root's derivative at mse_raw == 0 is
// defined as 0.
LossValue pedcc_loss(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                     const CentroidSet& centers, const LossConfig& cfg);

}  // namespace pedcc
