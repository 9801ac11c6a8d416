#include <cstring>
#include <vector>

#include "doctest.h"
#include "pedcc/encoding.hpp"
#include "pedcc/errors.hpp"

using namespace pedcc;

namespace {

std::vector<std::uint8_t> bytes_of(const char* text) {
    return {reinterpret_cast<const std::uint8_t*>(text),
            reinterpret_cast<const std::uint8_t*>(text) + std::strlen(text)};
}

}  // namespace

TEST_CASE("base64 encodes the RFC 4648 vectors") {
    CHECK(base64_encode({}) == "");
    CHECK(base64_encode(bytes_of("f")) == "Zg==");
    CHECK(base64_encode(bytes_of("fo")) == "Zm8=");
    CHECK(base64_encode(bytes_of("foo")) == "Zm9v");
    CHECK(base64_encode(bytes_of("foob")) == "Zm9vYg==");
    CHECK(base64_encode(bytes_of("fooba")) == "Zm9vYmE=");
    CHECK(base64_encode(bytes_of("foobar")) == "Zm9vYmFy");
}

TEST_CASE("base64 decode inverts encode for every remainder length") {
    for (int len = 0; len <= 17; ++len) {
        std::vector<std::uint8_t> data;
        for (int i = 0; i < len; ++i) data.push_back(static_cast<std::uint8_t>(i * 37 + 5));
        CHECK(base64_decode(base64_encode(data)) == data);
    }
}

TEST_CASE("base64 decode rejects malformed input") {
    CHECK_THROWS_WITH_AS(base64_decode("Zm9"), doctest::Contains("length"),
                         Error);  // not a multiple of 4
    CHECK_THROWS_AS(base64_decode("Zm9@"), Error);
    CHECK_THROWS_AS(base64_decode("Z==="), Error);
    CHECK_THROWS_AS(base64_decode("====" ), Error);
    try {
        base64_decode("Zm9@");
        FAIL("expected a corrupt-payload error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::corrupt_payload);
    }
}

TEST_CASE("f32 packing is little-endian row-major") {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 1.0;
    const auto bytes = pack_f32_le(m);
    REQUIRE(bytes.size() == 4);
    // 1.0f = 0x3F800000, stored little-endian.
    CHECK(bytes[0] == 0x00);
    CHECK(bytes[1] == 0x00);
    CHECK(bytes[2] == 0x80);
    CHECK(bytes[3] == 0x3f);

    Eigen::MatrixXd two(2, 2);
    two << 1.0, 2.0, 3.0, 4.0;
    const auto packed = pack_f32_le(two);
    REQUIRE(packed.size() == 16);
    // Row-major: 1, 2, 3, 4. 2.0f = 0x40000000, 3.0f = 0x40400000.
    CHECK(packed[7] == 0x40);
    CHECK(packed[10] == 0x40);
    CHECK(packed[11] == 0x40);
}

TEST_CASE("f32 round trip preserves float-representable values exactly") {
    Eigen::MatrixXd m(2, 3);
    m << 0.5, -1.25, 3.0, 1e-3, -0.0, 7.5;
    const Eigen::MatrixXd back = unpack_f32_le(pack_f32_le(m), 2, 3);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(back(i, j) == static_cast<double>(static_cast<float>(m(i, j))));
}

TEST_CASE("f32 round trip quantizes doubles to their nearest float") {
    Eigen::MatrixXd m(1, 2);
    m << 0.1, 1.0 / 3.0;
    const Eigen::MatrixXd back = unpack_f32_le(pack_f32_le(m), 1, 2);
    CHECK(back(0, 0) == static_cast<double>(0.1f));
    CHECK(back(0, 1) == static_cast<double>(static_cast<float>(1.0 / 3.0)));
    // Quantization is idempotent: a second trip changes nothing.
    CHECK(unpack_f32_le(pack_f32_le(back), 1, 2) == back);
}

TEST_CASE("unpack rejects payloads of the wrong size") {
    std::vector<std::uint8_t> bytes(12);
    CHECK_THROWS_AS(unpack_f32_le(bytes, 2, 2), Error);
    try {
        unpack_f32_le(bytes, 2, 2);
        FAIL("expected a corrupt-payload error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::corrupt_payload);
    }
}
