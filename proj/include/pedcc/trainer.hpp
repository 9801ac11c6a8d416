#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pedcc/dataset.hpp"
#include "pedcc/loss.hpp"
#include "pedcc/network.hpp"

namespace pedcc {

// SGD with momentum and coupled weight decay under a step-drop schedule.
// Defaults follow the usual image-classification recipe: lr 0.1 divided
// by 10 at epochs 20/50/80/100, batch 256, momentum 0.9, decay 5e-4,
// 120 epochs.
struct TrainConfig {
    int epochs = 120;
    int batch_size = 256;
    double base_lr = 0.1;
    std::vector<int> lr_drop_epochs{20, 50, 80, 100};
    double lr_drop_factor = 10.0;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    LossConfig loss;
    std::uint64_t seed = 0;
};

void validate_train_config(const TrainConfig& cfg);

// The drop takes effect at the start of the listed epoch: with drops at
// {20,...}, epoch 19 still runs at base_lr and epoch 20 runs divided.
double lr_at_epoch(const TrainConfig& cfg, int epoch);

// v <- momentum*v + grad + weight_decay*param; param <- param - lr*v.
void sgd_update(std::vector<DenseLayer>& parameters, const Gradients& gradients,
                std::vector<DenseLayer>& velocity, double lr, const TrainConfig& cfg);

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double mean_loss = 0.0;
    double am_loss = 0.0;
    double mse_loss = 0.0;  // root-term contribution
    double train_accuracy = 0.0;
};

struct TrainResult {
    NetworkModel model;
    std::vector<EpochStats> trace;
};

// Trains one network on one task batch. The label map is the sorted set
// of global labels present in `data`; it must have exactly head.n_classes
// entries. The head is stored frozen and is byte-identical after training.
TrainResult train_task(const LabeledDataset& data, const CentroidSet& head,
                       const NetworkSpec& spec, const TrainConfig& cfg);

void write_trace_csv(const std::vector<EpochStats>& trace, std::ostream& out);
void write_trace_csv(const std::vector<EpochStats>& trace, const std::string& path);

}  // namespace pedcc
