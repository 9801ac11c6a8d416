#include "pedcc/errors.hpp"

namespace pedcc {

const char* errc_name(errc code) {
    switch (code) {
        case errc::invalid_argument: return "invalid argument";
        case errc::infeasible_simplex: return "infeasible simplex";
        case errc::shape_mismatch: return "shape mismatch";
        case errc::degenerate_feature: return "degenerate feature";
        case errc::label_out_of_range: return "label out of range";
        case errc::class_coverage: return "class coverage";
        case errc::disjoint_labels: return "labels not disjoint";
        case errc::training_diverged: return "training diverged";
        case errc::cache_mismatch: return "cache mismatch";
        case errc::file_missing: return "file missing";
        case errc::format: return "format error";
        case errc::version_mismatch: return "version mismatch";
        case errc::corrupt_payload: return "corrupt payload";
        case errc::manifest_mismatch: return "manifest mismatch";
        case errc::count_mismatch: return "count mismatch";
        case errc::split: return "split error";
        case errc::nonfinite_data: return "non-finite data";
        case errc::io: return "io error";
    }
    return "unknown error";
}

}  // namespace pedcc
