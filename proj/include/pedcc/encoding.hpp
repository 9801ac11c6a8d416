#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace pedcc {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

// Throws Error(errc::corrupt_payload) on invalid characters or padding.
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Row-major little-endian IEEE-754 32-bit packing. This is the on-disk
// representation of every weight and centroid matrix.
std::vector<std::uint8_t> pack_f32_le(const Eigen::MatrixXd& m);
Eigen::MatrixXd unpack_f32_le(const std::vector<std::uint8_t>& bytes,
                              Eigen::Index rows, Eigen::Index cols);

}  // namespace pedcc
