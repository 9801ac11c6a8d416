#include "pedcc/classifier.hpp"

#include <algorithm>
#include <set>

#include "pedcc/errors.hpp"

namespace pedcc {

Eigen::VectorXd discriminant_scores(const Eigen::VectorXd& feature, const CentroidSet& centers) {
    if (feature.size() != centers.dim)
        throw Error(errc::shape_mismatch,
                    "feature dim " + std::to_string(feature.size()) + " vs centroid dim " +
                        std::to_string(centers.dim));
    return centers.rows * normalize_feature(feature);
}

namespace {

// Lowest index wins ties: strict > while scanning ascending indices.
int argmax_lowest(const Eigen::VectorXd& scores) {
    int best = 0;
    for (int i = 1; i < scores.size(); ++i)
        if (scores(i) > scores(best)) best = i;
    return best;
}

}  // namespace

Prediction predict(const NetworkModel& model, const Eigen::VectorXd& sample) {
    Eigen::VectorXd scores = discriminant_scores(forward_one(model, sample), model.head);
    const int local = argmax_lowest(scores);
    return {model.label_map[static_cast<std::size_t>(local)], 0, scores(local)};
}

Prediction subset_predict(const NetworkModel& model, const Eigen::VectorXd& sample,
                          const std::vector<int>& subset) {
    if (subset.empty())
        throw Error(errc::invalid_argument, "subset must be nonempty");
    std::set<int> seen;
    for (int idx : subset) {
        if (idx < 0 || idx >= model.head.n_classes)
            throw Error(errc::invalid_argument,
                        "subset index " + std::to_string(idx) + " outside [0, " +
                            std::to_string(model.head.n_classes) + ")");
        if (!seen.insert(idx).second)
            throw Error(errc::invalid_argument, "duplicate subset index " + std::to_string(idx));
    }

    Eigen::VectorXd scores = discriminant_scores(forward_one(model, sample), model.head);
    int best = -1;
    for (int idx : seen) {  // ascending local order, strict > keeps the lowest on ties
        if (best < 0 || scores(idx) > scores(best)) best = idx;
    }
    return {model.label_map[static_cast<std::size_t>(best)], 0, scores(best)};
}

Prediction ensemble_predict(const EnsembleModel& ensemble, const Eigen::VectorXd& sample) {
    if (ensemble.members.empty())
        throw Error(errc::invalid_argument, "ensemble has no members");
    const int width = ensemble.members.front().spec.input_dim;
    for (const NetworkModel& member : ensemble.members)
        if (member.spec.input_dim != width)
            throw Error(errc::shape_mismatch, "ensemble members disagree on input width");

    Prediction best;
    bool first = true;
    for (std::size_t j = 0; j < ensemble.members.size(); ++j) {
        Prediction p = predict(ensemble.members[j], sample);
        p.network_index = static_cast<int>(j);
        if (first || p.score > best.score) {
            best = p;
            first = false;
        }
    }
    return best;
}

}  // namespace pedcc
