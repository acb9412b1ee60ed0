#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fieldscan {

// Error taxonomy: every failure surfaces as one of these so callers (and the
// CLI) can translate them into distinct diagnostics.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct PlanningError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Row-major raster. `channels` is 1 (labels, masks) or 3 (RGB, interleaved).
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int ch, T fill = T{})
        : width(w), height(h), channels(ch),
          data(static_cast<size_t>(w) * h * ch, fill) {
        if (w <= 0 || h <= 0 || (ch != 1 && ch != 3))
            throw ValidationError("image dims must be positive with 1 or 3 channels");
    }

    size_t idx(int x, int y, int c = 0) const {
        return (static_cast<size_t>(y) * width + x) * channels + c;
    }
    T& at(int x, int y, int c = 0) { return data[idx(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return data[idx(x, y, c)]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    bool operator==(const Image&) const = default;
};

using ImageU8 = Image<uint8_t>;
using ImageF32 = Image<float>;

// FNV-1a, used to fingerprint worlds so comparisons refuse mismatched runs.
inline uint64_t fnv1a64(const void* bytes, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const uint8_t*>(bytes);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(uint64_t v);

}  // namespace fieldscan
