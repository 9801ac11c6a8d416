#include "pedcc/loss.hpp"

#include <cmath>

#include "pedcc/errors.hpp"
#include "pedcc/network.hpp"

namespace pedcc {

namespace {

void check_labels(const std::vector<int>& labels, Eigen::Index batch, int n_classes) {
    if (static_cast<Eigen::Index>(labels.size()) != batch)
        throw Error(errc::shape_mismatch, "label count does not match batch size");
    for (int y : labels)
        if (y < 0 || y >= n_classes)
            throw Error(errc::label_out_of_range,
                        "label " + std::to_string(y) + " outside [0, " + std::to_string(n_classes) + ")");
}

}  // namespace

void validate_loss_config(const LossConfig& cfg) {
    if (!(cfg.s > 0.0))
        throw Error(errc::invalid_argument, "scale s must be positive");
    if (!(cfg.m >= 0.0 && cfg.m < 1.0))
        throw Error(errc::invalid_argument, "margin m must be in [0, 1)");
    if (!(cfg.n >= 1.0))
        throw Error(errc::invalid_argument, "root exponent n must be >= 1");
}

Eigen::MatrixXd cosine_logits(const Eigen::MatrixXd& features, const CentroidSet& centers) {
    if (features.cols() != centers.dim)
        throw Error(errc::shape_mismatch,
                    "feature dim " + std::to_string(features.cols()) + " vs centroid dim " +
                        std::to_string(centers.dim));
    return normalize_feature_rows(features) * centers.rows.transpose();
}

AmSoftmaxResult am_softmax_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                                const LossConfig& cfg) {
    validate_loss_config(cfg);
    if (!logits.allFinite())
        throw Error(errc::invalid_argument, "logits must be finite");
    const Eigen::Index batch = logits.rows();
    const int n_classes = static_cast<int>(logits.cols());
    check_labels(labels, batch, n_classes);

    AmSoftmaxResult result;
    result.grad_wrt_logits.setZero(batch, n_classes);
    const double inv_batch = 1.0 / static_cast<double>(batch);

    for (Eigen::Index i = 0; i < batch; ++i) {
        const int y = labels[i];
        Eigen::RowVectorXd z = cfg.s * logits.row(i);
        z(y) -= cfg.s * cfg.m;

        const double zmax = z.maxCoeff();
        Eigen::RowVectorXd p = (z.array() - zmax).exp().matrix();
        const double denom = p.sum();
        p /= denom;

        result.loss += -(z(y) - zmax - std::log(denom)) * inv_batch;
        result.grad_wrt_logits.row(i) = cfg.s * inv_batch * p;
        result.grad_wrt_logits(i, y) -= cfg.s * inv_batch;
    }
    return result;
}

MseCenterResult mse_center_loss(const Eigen::MatrixXd& normalized_features,
                                const std::vector<int>& labels, const CentroidSet& centers) {
    if (normalized_features.cols() != centers.dim)
        throw Error(errc::shape_mismatch,
                    "feature dim " + std::to_string(normalized_features.cols()) +
                        " vs centroid dim " + std::to_string(centers.dim));
    const Eigen::Index batch = normalized_features.rows();
    check_labels(labels, batch, centers.n_classes);

    MseCenterResult result;
    result.per_sample.resize(batch);
    result.grad_wrt_features.resize(batch, centers.dim);
    for (Eigen::Index i = 0; i < batch; ++i) {
        Eigen::RowVectorXd residual = normalized_features.row(i) - centers.rows.row(labels[i]);
        result.per_sample(i) = 0.5 * residual.squaredNorm();
        result.grad_wrt_features.row(i) = residual;
    }
    result.loss = result.per_sample.sum();
    return result;
}

LossValue pedcc_loss(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                     const CentroidSet& centers, const LossConfig& cfg) {
    validate_loss_config(cfg);
    Eigen::MatrixXd unit = normalize_feature_rows(features);
    Eigen::MatrixXd logits = unit * centers.rows.transpose();

    AmSoftmaxResult am = am_softmax_loss(logits, labels, cfg);
    MseCenterResult mse = mse_center_loss(unit, labels, centers);

    const double root = std::pow(mse.loss, 1.0 / cfg.n);
    // Subgradient 0 at exactly zero residual keeps the optimum finite.
    const double root_coef =
        mse.loss > 0.0 ? (1.0 / cfg.n) * std::pow(mse.loss, 1.0 / cfg.n - 1.0) : 0.0;

    LossValue value;
    value.am_component = am.loss;
    value.mse_component_raw = mse.loss;
    value.total = am.loss + root;

    // Both branches' gradients w.r.t. the unit features, then through the
    // normalization x_hat = x / ||x||.
    Eigen::MatrixXd grad_unit =
        am.grad_wrt_logits * centers.rows + root_coef * mse.grad_wrt_features;
    value.grad_wrt_features.resize(features.rows(), features.cols());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double norm = features.row(i).norm();
        const Eigen::RowVectorXd& u = unit.row(i);
        Eigen::RowVectorXd g = grad_unit.row(i);
        value.grad_wrt_features.row(i) = (g - g.dot(u) * u) / norm;
    }
    return value;
}

}  // namespace pedcc
