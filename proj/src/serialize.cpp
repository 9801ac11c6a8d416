#include "pedcc/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pedcc/encoding.hpp"
#include "pedcc/errors.hpp"

namespace pedcc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json parse_json(const std::string& text, const std::string& what) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        throw Error(errc::format, "unparsable JSON in " + what);
    return doc;
}

void check_version(const json& doc, const std::string& what) {
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
        throw Error(errc::format, "missing format_version in " + what);
    const int version = doc["format_version"].get<int>();
    if (version != kFormatVersion)
        throw Error(errc::version_mismatch,
                    what + " has format_version " + std::to_string(version) + ", supported: " +
                        std::to_string(kFormatVersion));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(errc::file_missing, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(errc::io, "cannot write " + path);
    out << content;
    if (!out)
        throw Error(errc::io, "failed writing " + path);
}

json centroids_to_json(const CentroidSet& c) {
    return json{{"format_version", kFormatVersion},
                {"n_classes", c.n_classes},
                {"dim", c.dim},
                {"seed", c.seed},
                {"rows", base64_encode(pack_f32_le(c.rows))}};
}

CentroidSet centroids_from_json(const json& doc, const std::string& what) {
    check_version(doc, what);
    for (const char* key : {"n_classes", "dim", "seed", "rows"})
        if (!doc.contains(key))
            throw Error(errc::format, std::string("missing field '") + key + "' in " + what);
    CentroidSet c;
    c.n_classes = doc["n_classes"].get<int>();
    c.dim = doc["dim"].get<int>();
    c.seed = doc["seed"].get<std::uint64_t>();
    c.rows = unpack_f32_le(base64_decode(doc["rows"].get<std::string>()), c.n_classes, c.dim);
    validate_centroids(c);
    return c;
}

json model_to_json(const NetworkModel& model) {
    json layers = json::array();
    for (const DenseLayer& layer : model.layers)
        layers.push_back(json{{"rows", layer.weight.rows()},
                              {"cols", layer.weight.cols()},
                              {"weight", base64_encode(pack_f32_le(layer.weight))},
                              {"bias", base64_encode(pack_f32_le(layer.bias))}});
    return json{{"format_version", kFormatVersion},
                {"spec",
                 json{{"input_dim", model.spec.input_dim},
                      {"hidden_layers", model.spec.hidden_layers},
                      {"feature_dim", model.spec.feature_dim},
                      {"activation", activation_name(model.spec.activation)}}},
                {"label_map", model.label_map},
                {"head", centroids_to_json(model.head)},
                {"layers", layers}};
}

NetworkModel model_from_json(const json& doc, const std::string& what) {
    check_version(doc, what);
    for (const char* key : {"spec", "label_map", "head", "layers"})
        if (!doc.contains(key))
            throw Error(errc::format, std::string("missing field '") + key + "' in " + what);

    NetworkModel model;
    const json& spec = doc["spec"];
    model.spec.input_dim = spec.at("input_dim").get<int>();
    model.spec.hidden_layers = spec.at("hidden_layers").get<std::vector<int>>();
    model.spec.feature_dim = spec.at("feature_dim").get<int>();
    model.spec.activation = activation_from_name(spec.at("activation").get<std::string>());
    model.label_map = doc["label_map"].get<std::vector<int>>();
    model.head = centroids_from_json(doc["head"], what + " head");

    for (const json& entry : doc["layers"]) {
        DenseLayer layer;
        const auto rows = entry.at("rows").get<Eigen::Index>();
        const auto cols = entry.at("cols").get<Eigen::Index>();
        layer.weight = unpack_f32_le(base64_decode(entry.at("weight").get<std::string>()), rows, cols);
        layer.bias = unpack_f32_le(base64_decode(entry.at("bias").get<std::string>()), rows, 1);
        model.layers.push_back(std::move(layer));
    }

    if (model.spec.feature_dim != model.head.dim ||
        static_cast<int>(model.label_map.size()) != model.head.n_classes)
        throw Error(errc::format, "inconsistent head/spec/label_map in " + what);
    if (model.layers.empty())
        throw Error(errc::format, "model without layers in " + what);
    return model;
}

}  // namespace

std::string centroids_to_json_string(const CentroidSet& c) {
    return centroids_to_json(c).dump(2) + "\n";
}

CentroidSet centroids_from_json_string(const std::string& text) {
    return centroids_from_json(parse_json(text, "centroid document"), "centroid document");
}

void save_centroids(const CentroidSet& c, const std::string& path) {
    write_file(path, centroids_to_json_string(c));
}

CentroidSet load_centroids(const std::string& path) {
    try {
        return centroids_from_json(parse_json(read_file(path), path), path);
    } catch (const Error& e) {
        if (e.code() == errc::corrupt_payload)
            throw Error(errc::corrupt_payload, path + ": " + e.what());
        throw;
    }
}

std::string model_to_json_string(const NetworkModel& model) {
    return model_to_json(model).dump(2) + "\n";
}

NetworkModel model_from_json_string(const std::string& text) {
    return model_from_json(parse_json(text, "model document"), "model document");
}

void save_model(const NetworkModel& model, const std::string& path) {
    write_file(path, model_to_json_string(model));
}

NetworkModel load_model(const std::string& path) {
    try {
        return model_from_json(parse_json(read_file(path), path), path);
    } catch (const Error& e) {
        if (e.code() == errc::corrupt_payload)
            throw Error(errc::corrupt_payload, path + ": " + e.what());
        throw;
    }
}

std::string persist_ensemble(const EnsembleModel& ensemble, const std::string& directory) {
    fs::create_directories(directory);

    json member_files = json::array();
    json label_maps = json::array();
    for (std::size_t k = 0; k < ensemble.members.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "member_%03zu.json", k);
        save_model(ensemble.members[k], (fs::path(directory) / name).string());
        member_files.push_back(name);
        label_maps.push_back(ensemble.members[k].label_map);
    }

    json manifest{{"format_version", kFormatVersion},
                  {"kind", "ensemble"},
                  {"member_count", ensemble.members.size()},
                  {"input_dim",
                   ensemble.members.empty() ? 0 : ensemble.members.front().spec.input_dim},
                  {"centroid_seed", ensemble.centroid_seed},
                  {"centroid_iterations", ensemble.centroid_iterations},
                  {"members", member_files},
                  {"label_maps", label_maps}};
    const std::string manifest_path = (fs::path(directory) / "manifest.json").string();
    write_file(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

EnsembleModel restore_ensemble(const std::string& directory) {
    const std::string manifest_path = (fs::path(directory) / "manifest.json").string();
    json manifest = parse_json(read_file(manifest_path), manifest_path);
    check_version(manifest, manifest_path);
    for (const char* key : {"member_count", "members", "label_maps", "centroid_seed", "centroid_iterations"})
        if (!manifest.contains(key))
            throw Error(errc::format, std::string("missing field '") + key + "' in " + manifest_path);

    const auto member_count = manifest["member_count"].get<std::size_t>();
    const auto files = manifest["members"].get<std::vector<std::string>>();
    if (files.size() != member_count)
        throw Error(errc::manifest_mismatch,
                    manifest_path + " declares " + std::to_string(member_count) +
                        " members but lists " + std::to_string(files.size()) + " files");

    EnsembleModel ensemble;
    ensemble.centroid_seed = manifest["centroid_seed"].get<std::uint64_t>();
    ensemble.centroid_iterations = manifest["centroid_iterations"].get<int>();
    for (std::size_t k = 0; k < files.size(); ++k) {
        const std::string path = (fs::path(directory) / files[k]).string();
        NetworkModel member = load_model(path);
        if (manifest["label_maps"][k].get<std::vector<int>>() != member.label_map)
            throw Error(errc::manifest_mismatch,
                        "label map of " + path + " disagrees with " + manifest_path);
        ensemble.members.push_back(std::move(member));
    }

    std::set<int> seen;
    for (const NetworkModel& member : ensemble.members)
        for (int label : member.label_map)
            if (!seen.insert(label).second)
                throw Error(errc::manifest_mismatch,
                            "duplicate global label " + std::to_string(label) + " across members");
    return ensemble;
}

}  // namespace pedcc
