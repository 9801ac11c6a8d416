#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pedcc/dataset.hpp"
#include "pedcc/network.hpp"
#include "pedcc/trainer.hpp"

namespace pedcc {

// Ordered collection of per-task networks with pairwise-disjoint global
// label sets. Members are append-only: adding a task never mutates the
// networks already present. Centroid geometry for every task is keyed on
// (class count, feature dim, centroid_seed), so tasks with equal class
// counts share the same center layout.
struct EnsembleModel {
    std::vector<NetworkModel> members;
    std::uint64_t centroid_seed = 0;
    int centroid_iterations = 2000;
};

// Trains one new network on the task's data and appends it. The task's
// global labels must be disjoint from every existing member's labels.
// Returns the training trace of the new member.
std::vector<EpochStats> add_task(EnsembleModel& ensemble, const LabeledDataset& data,
                                 const NetworkSpec& spec, const TrainConfig& cfg);

struct EvaluationReport {
    std::vector<double> per_task_accuracy;   // member k on its own classes' samples
    std::vector<double> cumulative_accuracy; // first k+1 tasks vs first k+1 members
    std::vector<int> task_class_counts;
    std::map<int, std::map<int, int>> confusion_counts;  // true label -> predicted -> count
};

// Accuracy bookkeeping in the shape of a class-incremental results table:
// one own-task column plus one cumulative column per member.
EvaluationReport evaluate(const EnsembleModel& ensemble, const LabeledDataset& test);

// CSV: task_index,classes,per_task_accuracy,cumulative_accuracy with
// accuracies at 4 decimal places.
void emit_report(const EvaluationReport& report, std::ostream& out);
void emit_report(const EvaluationReport& report, const std::string& path);

}  // namespace pedcc
