#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pedcc/centroids.hpp"

namespace pedcc {

enum class Activation { relu, tanh, identity };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

struct NetworkSpec {
    int input_dim = 0;
    std::vector<int> hidden_layers;
    int feature_dim = 0;
    Activation activation = Activation::relu;
};

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
};

// Feed-forward feature extractor whose classification head is a frozen
// CentroidSet. The head is never part of `layers` and never receives a
// gradient. `label_map` maps local class index to the global class id.
struct NetworkModel {
    NetworkSpec spec;
    std::vector<DenseLayer> layers;
    CentroidSet head;
    std::vector<int> label_map;
    std::uint64_t revision = 0;  // bumped on parameter updates; guards stale caches
};

NetworkModel init_network(const NetworkSpec& spec, const CentroidSet& head,
                          std::vector<int> label_map, std::uint64_t seed);

struct ForwardCache {
    const NetworkModel* owner = nullptr;
    std::uint64_t revision = 0;
    Eigen::Index batch = 0;
    std::vector<Eigen::MatrixXd> layer_inputs;     // input to each layer
    std::vector<Eigen::MatrixXd> pre_activations;  // z of each hidden layer
};

// batch is samples x input_dim; returns samples x feature_dim. The final
// layer is linear; the activation applies to hidden layers only.
Eigen::MatrixXd forward(const NetworkModel& model, const Eigen::MatrixXd& batch,
                        ForwardCache* cache = nullptr);

Eigen::VectorXd forward_one(const NetworkModel& model, const Eigen::VectorXd& sample);

// Unit vector with the direction of x. Throws degenerate_feature when
// ||x|| <= 1e-12.
Eigen::VectorXd normalize_feature(const Eigen::VectorXd& x);
Eigen::MatrixXd normalize_feature_rows(const Eigen::MatrixXd& features);

struct Gradients {
    std::vector<DenseLayer> layers;  // same shapes as model.layers
};

// Backpropagates d(loss)/d(features) through the cached forward pass.
Gradients backward(const NetworkModel& model, const ForwardCache& cache,
                   const Eigen::MatrixXd& feature_grad);

}  // namespace pedcc
