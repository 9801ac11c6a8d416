#pragma once

#include <string>

#include "pedcc/centroids.hpp"
#include "pedcc/ensemble.hpp"
#include "pedcc/network.hpp"

namespace pedcc {

// All documents are JSON with an integer format_version; matrices travel
// as base64-encoded little-endian IEEE-754 32-bit floats, row-major.
inline constexpr int kFormatVersion = 1;

std::string centroids_to_json_string(const CentroidSet& c);
CentroidSet centroids_from_json_string(const std::string& text);
void save_centroids(const CentroidSet& c, const std::string& path);
CentroidSet load_centroids(const std::string& path);

std::string model_to_json_string(const NetworkModel& model);
NetworkModel model_from_json_string(const std::string& text);
void save_model(const NetworkModel& model, const std::string& path);
NetworkModel load_model(const std::string& path);

// Directory layout: manifest.json plus one self-describing member file
// per network. Returns the manifest path.
std::string persist_ensemble(const EnsembleModel& ensemble, const std::string& directory);
EnsembleModel restore_ensemble(const std::string& directory);

}  // namespace pedcc
