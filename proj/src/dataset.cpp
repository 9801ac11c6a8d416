#include "pedcc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "pedcc/centroids.hpp"
#include "pedcc/errors.hpp"
#include "pedcc/rng.hpp"

namespace pedcc {

namespace {

std::vector<int> sorted_unique(const std::vector<int>& labels) {
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw Error(errc::format, "truncated header in " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

LabeledDataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels) {
    if (features.rows() != static_cast<Eigen::Index>(labels.size()))
        throw Error(errc::shape_mismatch,
                    std::to_string(features.rows()) + " feature rows vs " +
                        std::to_string(labels.size()) + " labels");
    if (!features.allFinite())
        throw Error(errc::nonfinite_data, "dataset features hold NaN or Inf");
    LabeledDataset d;
    d.class_set = sorted_unique(labels);
    d.features = std::move(features);
    d.labels = std::move(labels);
    return d;
}

LabeledDataset synth_blobs(int n_classes, int dim, int samples_per_class,
                           double separation, std::uint64_t seed) {
    if (n_classes < 2)
        throw Error(errc::invalid_argument, "need at least 2 classes");
    if (samples_per_class < 1)
        throw Error(errc::invalid_argument, "need at least 1 sample per class");
    if (!(separation > 0.0))
        throw Error(errc::invalid_argument, "separation must be positive");
    if (dim < 2)
        throw Error(errc::invalid_argument, "need dim >= 2");

    // Means come from the same even-layout machinery as the classifier
    // heads, so class separability is controlled by a single knob.
    Eigen::MatrixXd layout =
        (n_classes <= dim + 1)
            ? simplex_centroids(n_classes, dim).rows
            : generate_centroids(n_classes, dim, seed, 500).rows;

    auto engine = make_engine(seed, /*stream=*/0x626c6f62ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int total = n_classes * samples_per_class;
    Eigen::MatrixXd features(total, dim);
    std::vector<int> labels(total);
    int row = 0;
    for (int c = 0; c < n_classes; ++c) {
        for (int k = 0; k < samples_per_class; ++k, ++row) {
            for (int j = 0; j < dim; ++j)
                features(row, j) = separation * layout(c, j) + gauss(engine);
            labels[row] = c;
        }
    }
    return make_dataset(std::move(features), std::move(labels));
}

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs(images_path, std::ios::binary);
    if (!imgs)
        throw Error(errc::file_missing, images_path);
    std::ifstream labs(labels_path, std::ios::binary);
    if (!labs)
        throw Error(errc::file_missing, labels_path);

    const std::uint32_t img_magic = read_u32_be(imgs, images_path);
    if (img_magic != 0x00000803u)
        throw Error(errc::format, "bad image magic in " + images_path);
    const std::uint32_t n_images = read_u32_be(imgs, images_path);
    const std::uint32_t rows = read_u32_be(imgs, images_path);
    const std::uint32_t cols = read_u32_be(imgs, images_path);

    const std::uint32_t lab_magic = read_u32_be(labs, labels_path);
    if (lab_magic != 0x00000801u)
        throw Error(errc::format, "bad label magic in " + labels_path);
    const std::uint32_t n_labels = read_u32_be(labs, labels_path);

    if (n_images != n_labels)
        throw Error(errc::count_mismatch,
                    std::to_string(n_images) + " images vs " + std::to_string(n_labels) + " labels");

    const std::size_t pixels = std::size_t(rows) * cols;
    std::vector<unsigned char> buffer(pixels);
    Eigen::MatrixXd features(n_images, static_cast<Eigen::Index>(pixels));
    for (std::uint32_t i = 0; i < n_images; ++i) {
        imgs.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(pixels));
        if (!imgs)
            throw Error(errc::format, "truncated image payload in " + images_path);
        for (std::size_t p = 0; p < pixels; ++p)
            features(i, static_cast<Eigen::Index>(p)) = buffer[p] / 255.0;
    }

    std::vector<unsigned char> raw_labels(n_labels);
    labs.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n_labels));
    if (!labs)
        throw Error(errc::format, "truncated label payload in " + labels_path);

    std::vector<int> labels(raw_labels.begin(), raw_labels.end());
    return make_dataset(std::move(features), std::move(labels));
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           double train_fraction,
                                                           std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(errc::invalid_argument, "train_fraction must be in (0, 1)");

    std::map<int, std::vector<Eigen::Index>> by_class;
    for (Eigen::Index i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
    for (const auto& [label, idx] : by_class)
        if (idx.size() < 2)
            throw Error(errc::split,
                        "class " + std::to_string(label) + " has fewer than 2 samples");

    auto engine = make_engine(seed, /*stream=*/0x73706c69ULL);
    std::vector<Eigen::Index> train_idx, test_idx;
    for (auto& [label, idx] : by_class) {
        fisher_yates(idx, engine);
        auto want = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
        want = std::clamp<std::size_t>(want, 1, idx.size() - 1);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(want));
        test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(want), idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto take = [&](const std::vector<Eigen::Index>& keep) {
        Eigen::MatrixXd f(static_cast<Eigen::Index>(keep.size()), data.dim());
        std::vector<int> l(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            f.row(static_cast<Eigen::Index>(i)) = data.features.row(keep[i]);
            l[i] = data.labels[keep[i]];
        }
        return make_dataset(std::move(f), std::move(l));
    };
    return {take(train_idx), take(test_idx)};
}

LabeledDataset filter_classes(const LabeledDataset& data, const std::vector<int>& classes) {
    std::set<int> keep(classes.begin(), classes.end());
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < data.size(); ++i)
        if (keep.count(data.labels[i])) idx.push_back(i);
    Eigen::MatrixXd f(static_cast<Eigen::Index>(idx.size()), data.dim());
    std::vector<int> l(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        f.row(static_cast<Eigen::Index>(i)) = data.features.row(idx[i]);
        l[i] = data.labels[idx[i]];
    }
    return make_dataset(std::move(f), std::move(l));
}

LabeledDataset offset_labels(const LabeledDataset& data, int offset) {
    std::vector<int> labels = data.labels;
    for (int& l : labels) l += offset;
    return make_dataset(data.features, std::move(labels));
}

void save_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(errc::io, "cannot write " + path);
    out << "label";
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << ",f" << j;
    out << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        out << data.labels[i];
        for (Eigen::Index j = 0; j < data.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.features(i, j));
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out)
        throw Error(errc::io, "failed writing " + path);
}

LabeledDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(errc::file_missing, path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(errc::format, "empty CSV " + path);
    if (line.rfind("label", 0) != 0)
        throw Error(errc::format, "CSV header must start with 'label' in " + path);

    Eigen::Index dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    if (dim < 1)
        throw Error(errc::format, "CSV header declares no feature columns in " + path);

    std::vector<int> labels;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ','))
            throw Error(errc::format, "bad CSV row in " + path);
        try {
            labels.push_back(std::stoi(cell));
        } catch (const std::exception&) {
            throw Error(errc::format, "bad label '" + cell + "' in " + path);
        }
        Eigen::Index got = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(errc::format, "bad value '" + cell + "' in " + path);
            }
            ++got;
        }
        if (got != dim)
            throw Error(errc::format, "row with " + std::to_string(got) + " values, expected " +
                                          std::to_string(dim) + " in " + path);
    }
    Eigen::MatrixXd features(static_cast<Eigen::Index>(labels.size()), dim);
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            features(i, j) = values[static_cast<std::size_t>(i * dim + j)];
    return make_dataset(std::move(features), std::move(labels));
}

}  // namespace pedcc
