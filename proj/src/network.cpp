#include "pedcc/network.hpp"

#include <cmath>
#include <random>
#include <set>

#include "pedcc/errors.hpp"
#include "pedcc/rng.hpp"

namespace pedcc {

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation a) {
    switch (a) {
        case Activation::relu: return z.cwiseMax(0.0);
        case Activation::tanh: return z.array().tanh().matrix();
        case Activation::identity: return z;
    }
    throw Error(errc::invalid_argument, "unknown activation");
}

Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z, Activation a) {
    switch (a) {
        case Activation::relu:
            return (z.array() > 0.0).cast<double>().matrix();
        case Activation::tanh:
            return (1.0 - z.array().tanh().square()).matrix();
        case Activation::identity:
            return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    }
    throw Error(errc::invalid_argument, "unknown activation");
}

std::vector<int> layer_widths(const NetworkSpec& spec) {
    std::vector<int> widths;
    widths.push_back(spec.input_dim);
    for (int h : spec.hidden_layers) widths.push_back(h);
    widths.push_back(spec.feature_dim);
    return widths;
}

}  // namespace

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "identity") return Activation::identity;
    throw Error(errc::invalid_argument, "unknown activation '" + name + "'");
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    return "unknown";
}

NetworkModel init_network(const NetworkSpec& spec, const CentroidSet& head,
                          std::vector<int> label_map, std::uint64_t seed) {
    if (spec.input_dim < 1 || spec.feature_dim < 1)
        throw Error(errc::invalid_argument, "layer widths must be >= 1");
    for (int h : spec.hidden_layers)
        if (h < 1) throw Error(errc::invalid_argument, "layer widths must be >= 1");
    if (spec.feature_dim != head.dim)
        throw Error(errc::shape_mismatch,
                    "feature_dim " + std::to_string(spec.feature_dim) + " vs head dim " +
                        std::to_string(head.dim));
    if (static_cast<int>(label_map.size()) != head.n_classes)
        throw Error(errc::shape_mismatch,
                    "label map has " + std::to_string(label_map.size()) + " entries, head has " +
                        std::to_string(head.n_classes) + " classes");
    std::set<int> unique_labels(label_map.begin(), label_map.end());
    if (unique_labels.size() != label_map.size())
        throw Error(errc::invalid_argument, "label map entries must be unique");

    NetworkModel model;
    model.spec = spec;
    model.head = head;
    model.label_map = std::move(label_map);

    auto engine = make_engine(seed, /*stream=*/0x696e6974ULL);
    const auto widths = layer_widths(spec);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        DenseLayer layer;
        layer.weight.resize(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = uniform(engine);
        layer.bias = Eigen::VectorXd::Zero(fan_out);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

Eigen::MatrixXd forward(const NetworkModel& model, const Eigen::MatrixXd& batch,
                        ForwardCache* cache) {
    if (batch.cols() != model.spec.input_dim)
        throw Error(errc::shape_mismatch,
                    "input width " + std::to_string(batch.cols()) + " does not match spec input_dim " +
                        std::to_string(model.spec.input_dim));
    if (cache) {
        cache->owner = &model;
        cache->revision = model.revision;
        cache->batch = batch.rows();
        cache->layer_inputs.clear();
        cache->pre_activations.clear();
    }

    Eigen::MatrixXd current = batch;
    const std::size_t last = model.layers.size() - 1;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        if (cache) cache->layer_inputs.push_back(current);
        const DenseLayer& layer = model.layers[l];
        Eigen::MatrixXd z = (current * layer.weight.transpose()).rowwise() + layer.bias.transpose();
        if (l == last) {
            current = std::move(z);
        } else {
            if (cache) cache->pre_activations.push_back(z);
            current = apply_activation(z, model.spec.activation);
        }
    }
    return current;
}

Eigen::VectorXd forward_one(const NetworkModel& model, const Eigen::VectorXd& sample) {
    return forward(model, sample.transpose()).row(0);
}

Eigen::VectorXd normalize_feature(const Eigen::VectorXd& x) {
    const double norm = x.norm();
    if (!(norm > 1e-12))
        throw Error(errc::degenerate_feature, "feature norm " + std::to_string(norm));
    return x / norm;
}

Eigen::MatrixXd normalize_feature_rows(const Eigen::MatrixXd& features) {
    Eigen::MatrixXd out(features.rows(), features.cols());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double norm = features.row(i).norm();
        if (!(norm > 1e-12))
            throw Error(errc::degenerate_feature,
                        "feature row " + std::to_string(i) + " has norm " + std::to_string(norm));
        out.row(i) = features.row(i) / norm;
    }
    return out;
}

Gradients backward(const NetworkModel& model, const ForwardCache& cache,
                   const Eigen::MatrixXd& feature_grad) {
    if (cache.owner != &model || cache.layer_inputs.size() != model.layers.size())
        throw Error(errc::cache_mismatch, "cache was not produced by this model");
    if (cache.revision != model.revision)
        throw Error(errc::cache_mismatch, "model parameters changed since the forward pass");
    if (feature_grad.rows() != cache.batch || feature_grad.cols() != model.spec.feature_dim)
        throw Error(errc::shape_mismatch, "feature gradient shape does not match the cached batch");

    Gradients grads;
    grads.layers.resize(model.layers.size());

    Eigen::MatrixXd delta = feature_grad;  // d(loss)/d(z) of the current layer
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const Eigen::MatrixXd& input = cache.layer_inputs[l];
        grads.layers[l].weight = delta.transpose() * input;
        grads.layers[l].bias = delta.colwise().sum().transpose();
        if (l > 0) {
            Eigen::MatrixXd upstream = delta * model.layers[l].weight;
            delta = upstream.cwiseProduct(
                activation_derivative(cache.pre_activations[l - 1], model.spec.activation));
        }
    }
    return grads;
}

}  // namespace pedcc
