#include "pedcc/encoding.hpp"

#include <bit>
#include <cstring>

#include "pedcc/errors.hpp"

namespace pedcc {

namespace {

const char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

std::uint32_t f32_bits_le(float v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
        bits = ((bits & 0xff000000u) >> 24) | ((bits & 0x00ff0000u) >> 8) |
               ((bits & 0x0000ff00u) << 8) | ((bits & 0x000000ffu) << 24);
    }
    return bits;
}

}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back(kAlphabet[v & 63]);
    }
    std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        std::uint32_t v = bytes[i] << 16;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rest == 2) {
        std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0)
        throw Error(errc::corrupt_payload, "base64 length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int pad = 0;
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            char c = text[i + k];
            if (c == '=') {
                if (i + 4 != text.size() || k < 2)
                    throw Error(errc::corrupt_payload, "base64 padding misplaced");
                ++pad;
                v <<= 6;
                continue;
            }
            if (pad > 0)
                throw Error(errc::corrupt_payload, "base64 data after padding");
            int d = decode_char(c);
            if (d < 0)
                throw Error(errc::corrupt_payload, "invalid base64 character");
            v = (v << 6) | static_cast<std::uint32_t>(d);
        }
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

std::vector<std::uint8_t> pack_f32_le(const Eigen::MatrixXd& m) {
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(m.size()) * 4);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::uint32_t bits = f32_bits_le(static_cast<float>(m(r, c)));
            out.push_back(static_cast<std::uint8_t>(bits & 0xff));
            out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xff));
            out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xff));
            out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xff));
        }
    }
    return out;
}

Eigen::MatrixXd unpack_f32_le(const std::vector<std::uint8_t>& bytes,
                              Eigen::Index rows, Eigen::Index cols) {
    const std::size_t expected = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 4;
    if (bytes.size() != expected)
        throw Error(errc::corrupt_payload,
                    "payload holds " + std::to_string(bytes.size()) + " bytes, expected " +
                        std::to_string(expected));
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            std::uint32_t bits = static_cast<std::uint32_t>(bytes[i]) |
                                 (static_cast<std::uint32_t>(bytes[i + 1]) << 8) |
                                 (static_cast<std::uint32_t>(bytes[i + 2]) << 16) |
                                 (static_cast<std::uint32_t>(bytes[i + 3]) << 24);
            i += 4;
            m(r, c) = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return m;
}

}  // namespace pedcc
