#include <algorithm>
#include <vector>

#include "kernels_backend.hpp"
#include "kernels_detail.hpp"

namespace fieldscan::kernels {

namespace {

void segment_pixels_scalar(const uint8_t* r, const uint8_t* g, const uint8_t* b,
                           size_t n, const SegmenterParams& params,
                           float* s0, float* s1, float* s2,
                           uint8_t* cls, float* prob) {
    for (size_t i = 0; i < n; ++i) {
        const detail::PixelScores px = detail::segment_one_impl(r[i], g[i], b[i], params);
        s0[i] = px.s[0];
        s1[i] = px.s[1];
        s2[i] = px.s[2];
        cls[i] = px.cls;
        prob[i] = px.prob;
    }
}

void box_blur_axis_u8_scalar(const uint8_t* src, uint8_t* dst, int width,
                             int height, int channels, int k, bool horizontal) {
    const int radius = k / 2;
    const float inv_k = 1.0f / static_cast<float>(k);
    const int row_stride = width * channels;
    if (horizontal) {
        for (int y = 0; y < height; ++y) {
            const uint8_t* row = src + static_cast<size_t>(y) * row_stride;
            uint8_t* out = dst + static_cast<size_t>(y) * row_stride;
            for (int x = 0; x < width; ++x) {
                for (int c = 0; c < channels; ++c) {
                    uint32_t sum = 0;
                    for (int j = -radius; j <= radius; ++j) {
                        const int xx = std::clamp(x + j, 0, width - 1);
                        sum += row[xx * channels + c];
                    }
                    out[x * channels + c] = detail::box_finalize(sum, inv_k);
                }
            }
        }
    } else {
        for (int y = 0; y < height; ++y) {
            uint8_t* out = dst + static_cast<size_t>(y) * row_stride;
            for (int x = 0; x < row_stride; ++x) {
                uint32_t sum = 0;
                for (int j = -radius; j <= radius; ++j) {
                    const int yy = std::clamp(y + j, 0, height - 1);
                    sum += src[static_cast<size_t>(yy) * row_stride + x];
                }
                out[x] = detail::box_finalize(sum, inv_k);
            }
        }
    }
}

void luma601_f32_scalar(const uint8_t* rgb, float* out, size_t n) {
    for (size_t i = 0; i < n; ++i)
        out[i] = detail::luma_one(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
}

void filter11_h(const float* src, float* dst, int width, int height,
                const float taps[11]) {
    for (int y = 0; y < height; ++y) {
        const float* row = src + static_cast<size_t>(y) * width;
        float* out = dst + static_cast<size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            float acc = 0.0f;
            for (int j = -5; j <= 5; ++j) {
                const int xx = std::clamp(x + j, 0, width - 1);
                acc = std::fmaf(taps[j + 5], row[xx], acc);
            }
            out[x] = acc;
        }
    }
}

void filter11_v(const float* src, float* dst, int width, int height,
                const float taps[11]) {
    for (int y = 0; y < height; ++y) {
        float* out = dst + static_cast<size_t>(y) * width;
        const float* rows[11];
        for (int j = -5; j <= 5; ++j)
            rows[j + 5] = src + static_cast<size_t>(std::clamp(y + j, 0, height - 1)) * width;
        for (int x = 0; x < width; ++x) {
            float acc = 0.0f;
            for (int j = 0; j < 11; ++j) acc = std::fmaf(taps[j], rows[j][x], acc);
            out[x] = acc;
        }
    }
}

void sep_filter11_f32_scalar(const float* src, float* tmp, float* dst,
                             int width, int height, const float taps[11]) {
    filter11_h(src, tmp, width, height, taps);
    filter11_v(tmp, dst, width, height, taps);
}

void ssim_combine_f32_scalar(const float* mu_a, const float* mu_b,
                             const float* mu_aa, const float* mu_bb,
                             const float* mu_ab, float* out, size_t n,
                             float c1, float c2) {
    for (size_t i = 0; i < n; ++i)
        out[i] = detail::ssim_one_impl(mu_a[i], mu_b[i], mu_aa[i], mu_bb[i],
                                       mu_ab[i], c1, c2);
}

}  // namespace

const BackendOps& scalar_ops() {
    static const BackendOps ops{
        segment_pixels_scalar, box_blur_axis_u8_scalar, luma601_f32_scalar,
        sep_filter11_f32_scalar, ssim_combine_f32_scalar,
    };
    return ops;
}

namespace detail {

float fast_expf(float x) { return fast_expf_impl(x); }

PixelScores segment_one(uint8_t r, uint8_t g, uint8_t b, const SegmenterParams& p) {
    return segment_one_impl(r, g, b, p);
}

float ssim_one(float mu_a, float mu_b, float mu_aa, float mu_bb, float mu_ab,
               float c1, float c2) {
    return ssim_one_impl(mu_a, mu_b, mu_aa, mu_bb, mu_ab, c1, c2);
}

}  // namespace detail

}  // namespace fieldscan::kernels
