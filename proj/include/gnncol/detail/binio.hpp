#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

namespace gnncol::detail {

inline void put_u32(std::ostream& out, std::uint32_t x) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((x >> (8 * i)) & 0xff);
    out.write(b, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t x) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((x >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline void put_f32(std::ostream& out, float x) {
    put_u32(out, std::bit_cast<std::uint32_t>(x));
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4] = {};
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= std::uint32_t(b[i]) << (8 * i);
    return x;
}

inline std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8] = {};
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= std::uint64_t(b[i]) << (8 * i);
    return x;
}

inline float get_f32(std::istream& in) {
    return std::bit_cast<float>(get_u32(in));
}

} // namespace gnncol::detail
