#include "pedcc/ensemble.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "pedcc/classifier.hpp"
#include "pedcc/errors.hpp"

namespace pedcc {

std::vector<EpochStats> add_task(EnsembleModel& ensemble, const LabeledDataset& data,
                                 const NetworkSpec& spec, const TrainConfig& cfg) {
    std::set<int> existing;
    for (const NetworkModel& member : ensemble.members)
        existing.insert(member.label_map.begin(), member.label_map.end());
    for (int label : data.class_set)
        if (existing.count(label))
            throw Error(errc::disjoint_labels,
                        "global label " + std::to_string(label) + " already claimed by an earlier task");
    if (!ensemble.members.empty() && ensemble.members.front().spec.input_dim != spec.input_dim)
        throw Error(errc::shape_mismatch, "task input_dim differs from existing members");

    // Same (N, M, seed) construction for every task, so tasks with equal
    // class counts get identical center geometry.
    CentroidSet head = generate_centroids(static_cast<int>(data.class_set.size()),
                                          spec.feature_dim, ensemble.centroid_seed,
                                          ensemble.centroid_iterations);
    TrainResult trained = train_task(data, head, spec, cfg);
    ensemble.members.push_back(std::move(trained.model));
    return std::move(trained.trace);
}

EvaluationReport evaluate(const EnsembleModel& ensemble, const LabeledDataset& test) {
    if (ensemble.members.empty())
        throw Error(errc::invalid_argument, "ensemble has no members");

    std::map<int, std::size_t> task_of_label;
    for (std::size_t k = 0; k < ensemble.members.size(); ++k)
        for (int label : ensemble.members[k].label_map) task_of_label[label] = k;
    for (int label : test.class_set)
        if (!task_of_label.count(label))
            throw Error(errc::invalid_argument,
                        "test label " + std::to_string(label) + " unknown to every member");

    const std::size_t n_members = ensemble.members.size();
    std::vector<Eigen::Index> task_total(n_members, 0), task_correct(n_members, 0);
    std::vector<Eigen::Index> cum_total(n_members, 0), cum_correct(n_members, 0);

    EvaluationReport report;
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const Eigen::VectorXd sample = test.features.row(i).transpose();
        const int truth = test.labels[static_cast<std::size_t>(i)];
        const std::size_t owner = task_of_label.at(truth);

        // One prediction per member; every aggregate below reads this scan.
        std::vector<Prediction> member_pred(n_members);
        for (std::size_t k = 0; k < n_members; ++k)
            member_pred[k] = predict(ensemble.members[k], sample);

        ++task_total[owner];
        if (member_pred[owner].global_label == truth) ++task_correct[owner];

        std::size_t winner = 0;
        for (std::size_t k = 0; k < n_members; ++k) {
            if (k > 0 && member_pred[k].score > member_pred[winner].score) winner = k;
            if (k >= owner) {
                ++cum_total[k];
                if (member_pred[winner].global_label == truth) ++cum_correct[k];
            }
        }
        ++report.confusion_counts[truth][member_pred[winner].global_label];
    }

    for (std::size_t k = 0; k < n_members; ++k) {
        report.per_task_accuracy.push_back(
            task_total[k] ? static_cast<double>(task_correct[k]) / static_cast<double>(task_total[k]) : 0.0);
        report.cumulative_accuracy.push_back(
            cum_total[k] ? static_cast<double>(cum_correct[k]) / static_cast<double>(cum_total[k]) : 0.0);
        report.task_class_counts.push_back(static_cast<int>(ensemble.members[k].label_map.size()));
    }
    return report;
}

void emit_report(const EvaluationReport& report, std::ostream& out) {
    out << "task_index,classes,per_task_accuracy,cumulative_accuracy\n";
    char buf[96];
    for (std::size_t k = 0; k < report.per_task_accuracy.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%zu,%d,%.4f,%.4f\n", k, report.task_class_counts[k],
                      report.per_task_accuracy[k], report.cumulative_accuracy[k]);
        out << buf;
    }
}

void emit_report(const EvaluationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(errc::io, "cannot write " + path);
    emit_report(report, out);
}

}  // namespace pedcc
