#pragma once

#include <Eigen/Core>
#include <vector>

#include "pedcc/centroids.hpp"
#include "pedcc/ensemble.hpp"
#include "pedcc/network.hpp"

namespace pedcc {

struct Prediction {
    int global_label = 0;
    int network_index = 0;  // ensemble member that produced it; 0 for single-model use
    double score = 0.0;     // cosine similarity of the winning centroid
};

// Cosine of the angle between the feature and each centroid row.
Eigen::VectorXd discriminant_scores(const Eigen::VectorXd& feature, const CentroidSet& centers);

// argmax of the cosine discriminant over the model's head; ties go to the
// lowest local index.
Prediction predict(const NetworkModel& model, const Eigen::VectorXd& sample);

// argmax restricted to the given local head rows. Subset entries must be
// valid, unique, and nonempty; ties go to the lowest local index.
Prediction subset_predict(const NetworkModel& model, const Eigen::VectorXd& sample,
                          const std::vector<int>& subset);

// Each member reports the max cosine over its own centers; the member
// with the best score wins and its local argmax gives the label. This
// equals a flat argmax over all (member, center) pairs. Ties go to the
// lowest member index, then the lowest local index.
Prediction ensemble_predict(const EnsembleModel& ensemble, const Eigen::VectorXd& sample);

}  // namespace pedcc
