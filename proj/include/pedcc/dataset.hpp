#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pedcc {

// Feature vectors (or flattened images) with integer global class labels.
struct LabeledDataset {
    Eigen::MatrixXd features;   // samples x input_dim
    std::vector<int> labels;    // per-sample global class id
    std::vector<int> class_set; // sorted unique labels

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

// Validates row counts, finiteness, and computes class_set.
LabeledDataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels);

// Isotropic unit-variance Gaussian clusters whose means sit at
// separation * (simplex-like unit layout). Labels are 0..n_classes-1;
// balanced, deterministic per seed.
LabeledDataset synth_blobs(int n_classes, int dim, int samples_per_class,
                           double separation, std::uint64_t seed);

// Big-endian IDX image/label pair; pixels flattened row-major and scaled
// to [0,1] by division by 255.
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

// Per-class proportional split; both sides keep at least one sample of
// every class. Deterministic per seed.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           double train_fraction,
                                                           std::uint64_t seed);

// Samples whose label is in `classes`, original order preserved.
LabeledDataset filter_classes(const LabeledDataset& data, const std::vector<int>& classes);

LabeledDataset offset_labels(const LabeledDataset& data, int offset);

// CSV with mandatory header: label,f0,...,f{d-1}.
void save_csv(const LabeledDataset& data, const std::string& path);
LabeledDataset load_csv(const std::string& path);

}  // namespace pedcc
