#pragma once

#include <cstdint>
#include <string>

namespace fieldscan::kernels {

// Pixel-rate inner loops. Every kernel has a scalar reference implementation
// and an AVX2 variant; the two are bit-exact by construction (identical
// per-lane operation order, explicit FMA on both sides, shared fast-exp
// polynomial), which the equivalence tests assert with zero tolerance.

enum class Backend { scalar, avx2 };

bool backend_supported(Backend b);
Backend active_backend();
void set_backend(Backend b);  // throws ValidationError if unsupported
std::string backend_name(Backend b);

// Resolves the startup default: FIELDSCAN_KERNELS=scalar|avx2 wins, else the
// best supported backend.
Backend default_backend();

struct SegmenterParams {
    // Prototype features per class, ordered (background, crop, weed).
    // hue6 is hue in [0,6) (degrees / 60); exg is 2g-r-b on [0,1] channels.
    float proto_hue6[3] = {0.f, 0.f, 0.f};
    float proto_exg[3] = {0.f, 0.f, 0.f};
    float inv_two_sigma_sq = 0.f;  // 1 / (2 sigma^2)
    float inv_temperature = 0.f;   // 1 / T
};

// Per-pixel prototype scoring: planar u8 RGB in, per-class softmax scores,
// argmax class (ties toward the lower class index) and max probability out.
void segment_pixels(const uint8_t* r, const uint8_t* g, const uint8_t* b,
                    size_t n, const SegmenterParams& params,
                    float* s0, float* s1, float* s2,
                    uint8_t* cls, float* prob);

// 1-D box mean of odd length k along x (horizontal=true) or y, edge
// replication, every channel independently. dst may not alias src.
void box_blur_axis_u8(const uint8_t* src, uint8_t* dst, int width, int height,
                      int channels, int k, bool horizontal);

// ITU-R 601 luma on the 0..255 scale from interleaved RGB.
void luma601_f32(const uint8_t* rgb, float* out, size_t n);

// Separable 11-tap filter with edge replication; taps must sum to ~1.
// tmp must hold width*height floats.
void sep_filter11_f32(const float* src, float* tmp, float* dst,
                      int width, int height, const float taps[11]);

// Per-pixel SSIM from the five filtered moment planes.
void ssim_combine_f32(const float* mu_a, const float* mu_b, const float* mu_aa,
                      const float* mu_bb, const float* mu_ab, float* out,
                      size_t n, float c1, float c2);

// Shared scalar lane math (also used by the AVX2 TU for borders/tails).
namespace detail {

float fast_expf(float x);

struct PixelScores {
    float s[3];
    uint8_t cls;
    float prob;
};

PixelScores segment_one(uint8_t r, uint8_t g, uint8_t b, const SegmenterParams& p);

float ssim_one(float mu_a, float mu_b, float mu_aa, float mu_bb, float mu_ab,
               float c1, float c2);

}  // namespace detail

}  // namespace fieldscan::kernels
