#include "pedcc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "pedcc/errors.hpp"
#include "pedcc/rng.hpp"

namespace pedcc {

void validate_train_config(const TrainConfig& cfg) {
    if (cfg.epochs < 1)
        throw Error(errc::invalid_argument, "epochs must be >= 1");
    if (cfg.batch_size < 1)
        throw Error(errc::invalid_argument, "batch_size must be >= 1");
    if (!(cfg.base_lr > 0.0))
        throw Error(errc::invalid_argument, "base_lr must be positive");
    if (!(cfg.lr_drop_factor > 0.0))
        throw Error(errc::invalid_argument, "lr_drop_factor must be positive");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
        throw Error(errc::invalid_argument, "momentum must be in [0, 1)");
    if (cfg.weight_decay < 0.0)
        throw Error(errc::invalid_argument, "weight_decay must be non-negative");
    for (std::size_t i = 0; i < cfg.lr_drop_epochs.size(); ++i) {
        if (cfg.lr_drop_epochs[i] >= cfg.epochs)
            throw Error(errc::invalid_argument, "lr drop epoch past the last epoch");
        if (i > 0 && cfg.lr_drop_epochs[i] <= cfg.lr_drop_epochs[i - 1])
            throw Error(errc::invalid_argument, "lr drop epochs must be strictly increasing");
    }
    validate_loss_config(cfg.loss);
}

double lr_at_epoch(const TrainConfig& cfg, int epoch) {
    if (epoch < 0 || epoch >= cfg.epochs)
        throw Error(errc::invalid_argument,
                    "epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(cfg.epochs) + ")");
    double lr = cfg.base_lr;
    for (int drop : cfg.lr_drop_epochs)
        if (epoch >= drop) lr /= cfg.lr_drop_factor;
    return lr;
}

void sgd_update(std::vector<DenseLayer>& parameters, const Gradients& gradients,
                std::vector<DenseLayer>& velocity, double lr, const TrainConfig& cfg) {
    if (gradients.layers.size() != parameters.size() || velocity.size() != parameters.size())
        throw Error(errc::shape_mismatch, "parameter/gradient/velocity layer counts disagree");
    for (std::size_t l = 0; l < parameters.size(); ++l) {
        DenseLayer& p = parameters[l];
        const DenseLayer& g = gradients.layers[l];
        DenseLayer& v = velocity[l];
        if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
            g.bias.size() != p.bias.size())
            throw Error(errc::shape_mismatch, "gradient shape does not match layer " + std::to_string(l));
        v.weight = cfg.momentum * v.weight + g.weight + cfg.weight_decay * p.weight;
        v.bias = cfg.momentum * v.bias + g.bias + cfg.weight_decay * p.bias;
        p.weight -= lr * v.weight;
        p.bias -= lr * v.bias;
    }
}

namespace {

double cosine_argmax_accuracy(const NetworkModel& model, const LabeledDataset& data,
                              const std::vector<int>& local_labels) {
    Eigen::MatrixXd features = forward(model, data.features);
    Eigen::MatrixXd logits = cosine_logits(features, model.head);
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index best;
        logits.row(i).maxCoeff(&best);
        if (static_cast<int>(best) == local_labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

}  // namespace

TrainResult train_task(const LabeledDataset& data, const CentroidSet& head,
                       const NetworkSpec& spec, const TrainConfig& cfg) {
    validate_train_config(cfg);
    if (data.size() == 0)
        throw Error(errc::class_coverage, "empty training set");
    if (static_cast<int>(data.class_set.size()) != head.n_classes)
        throw Error(errc::class_coverage,
                    "dataset has " + std::to_string(data.class_set.size()) + " classes, head expects " +
                        std::to_string(head.n_classes));

    // Local index = position of the global label in the sorted class set.
    std::vector<int> local_labels(data.labels.size());
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        auto it = std::lower_bound(data.class_set.begin(), data.class_set.end(), data.labels[i]);
        local_labels[i] = static_cast<int>(it - data.class_set.begin());
    }

    TrainResult result;
    result.model = init_network(spec, head, data.class_set, cfg.seed);
    NetworkModel& model = result.model;

    std::vector<DenseLayer> velocity;
    for (const DenseLayer& layer : model.layers)
        velocity.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                            Eigen::VectorXd::Zero(layer.bias.size())});

    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = lr_at_epoch(cfg, epoch);
        auto engine = make_engine(cfg.seed, 0x65706f63ULL + static_cast<std::uint64_t>(epoch));
        fisher_yates(order, engine);

        double sum_total = 0.0, sum_am = 0.0, sum_mse_root = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const Eigen::Index b = static_cast<Eigen::Index>(stop - start);
            Eigen::MatrixXd batch(b, data.dim());
            std::vector<int> batch_labels(static_cast<std::size_t>(b));
            for (Eigen::Index i = 0; i < b; ++i) {
                batch.row(i) = data.features.row(order[start + static_cast<std::size_t>(i)]);
                batch_labels[static_cast<std::size_t>(i)] =
                    local_labels[static_cast<std::size_t>(order[start + static_cast<std::size_t>(i)])];
            }

            ForwardCache cache;
            Eigen::MatrixXd features = forward(model, batch, &cache);
            if (!features.allFinite())
                throw Error(errc::training_diverged,
                            "non-finite features at epoch " + std::to_string(epoch));
            LossValue loss = pedcc_loss(features, batch_labels, model.head, cfg.loss);
            if (!std::isfinite(loss.total))
                throw Error(errc::training_diverged,
                            "non-finite loss at epoch " + std::to_string(epoch));

            Gradients grads = backward(model, cache, loss.grad_wrt_features);
            sgd_update(model.layers, grads, velocity, lr, cfg);
            ++model.revision;

            sum_total += loss.total;
            sum_am += loss.am_component;
            sum_mse_root += loss.total - loss.am_component;
            ++batches;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        stats.mean_loss = sum_total / batches;
        stats.am_loss = sum_am / batches;
        stats.mse_loss = sum_mse_root / batches;
        stats.train_accuracy = cosine_argmax_accuracy(model, data, local_labels);
        result.trace.push_back(stats);
    }
    return result;
}

void write_trace_csv(const std::vector<EpochStats>& trace, std::ostream& out) {
    out << "epoch,lr,mean_loss,am_loss,mse_loss,train_accuracy\n";
    char buf[160];
    for (const EpochStats& s : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.6f\n", s.epoch, s.lr,
                      s.mean_loss, s.am_loss, s.mse_loss, s.train_accuracy);
        out << buf;
    }
}

void write_trace_csv(const std::vector<EpochStats>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(errc::io, "cannot write " + path);
    write_trace_csv(trace, out);
}

}  // namespace pedcc
