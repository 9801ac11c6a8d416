#pragma once

#include <stdexcept>
#include <string>

namespace pedcc {

// Error categories used across the library. The CLI maps these onto
// exit codes, and tests match on the specific category.
enum class errc {
    invalid_argument,    // bad parameter value (n_classes < 2, fraction out of range, ...)
    infeasible_simplex,  // regular simplex requested with n_classes > dim + 1
    shape_mismatch,      // matrix/vector width disagreement
    degenerate_feature,  // feature vector with near-zero norm
    label_out_of_range,  // local label index outside [0, N)
    class_coverage,      // dataset classes do not match the head's class count
    disjoint_labels,     // new task labels overlap an existing member's labels
    training_diverged,   // non-finite loss during training
    cache_mismatch,      // backward called with a cache from another forward pass
    file_missing,
    format,              // unparsable file content (CSV/IDX/JSON)
    version_mismatch,    // unsupported format_version
    corrupt_payload,     // base64/size integrity failure
    manifest_mismatch,   // ensemble manifest disagrees with member files
    count_mismatch,      // paired files disagree on record count
    split,               // stratified split preconditions violated
    nonfinite_data,      // NaN/Inf in dataset features
    io,                  // unreadable/unwritable path
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

}  // namespace pedcc
