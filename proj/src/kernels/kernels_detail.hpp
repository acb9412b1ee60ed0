#pragma once

// Per-lane reference math shared by the scalar and AVX2 translation units.
// Both TUs compile with -ffp-contract=off; every fused multiply-add is
// explicit so each lane rounds identically no matter which backend ran it.

#include <bit>
#include <cmath>
#include <cstdint>

#include "fieldscan/kernels.hpp"

namespace fieldscan::kernels::detail {

inline constexpr float kLog2E = 1.442695040888963387e0f;
inline constexpr float kLn2Hi = 6.93145751953125e-1f;
inline constexpr float kLn2Lo = 1.428606765330187045e-6f;
inline constexpr float kExpClampLo = -87.0f;
inline constexpr float kExpClampHi = 88.0f;
// 1.5 * 2^23: adding then subtracting rounds to the nearest integer.
inline constexpr float kRoundMagic = 12582912.0f;

inline constexpr float kExpP0 = 1.9875691500e-4f;
inline constexpr float kExpP1 = 1.3981999507e-3f;
inline constexpr float kExpP2 = 8.3334519073e-3f;
inline constexpr float kExpP3 = 4.1665795894e-2f;
inline constexpr float kExpP4 = 1.6666665459e-1f;
inline constexpr float kExpP5 = 5.0000001201e-1f;

inline float fast_expf_impl(float x) {
    x = x < kExpClampLo ? kExpClampLo : x;
    x = x > kExpClampHi ? kExpClampHi : x;
    const float z = std::fmaf(x, kLog2E, kRoundMagic);
    const float n = z - kRoundMagic;
    float r = std::fmaf(n, -kLn2Hi, x);
    r = std::fmaf(n, -kLn2Lo, r);
    float p = kExpP0;
    p = std::fmaf(p, r, kExpP1);
    p = std::fmaf(p, r, kExpP2);
    p = std::fmaf(p, r, kExpP3);
    p = std::fmaf(p, r, kExpP4);
    p = std::fmaf(p, r, kExpP5);
    const float rr = r * r;
    float y = std::fmaf(p, rr, r);
    y += 1.0f;
    const int32_t ni = static_cast<int32_t>(n);
    const int32_t bits = (ni + 127) << 23;
    return y * std::bit_cast<float>(bits);
}

// Hue on the [0,6) scale plus excess-green from 8-bit RGB. Branches are
// written as selects so the vector path can mirror them with blends.
struct HueExg {
    float hue6;
    float exg;
};

inline HueExg hue_exg(uint8_t r8, uint8_t g8, uint8_t b8) {
    const float inv255 = 1.0f / 255.0f;
    const float r = static_cast<float>(r8) * inv255;
    const float g = static_cast<float>(g8) * inv255;
    const float b = static_cast<float>(b8) * inv255;
    const float mx = std::max(r, std::max(g, b));
    const float mn = std::min(r, std::min(g, b));
    const float delta = mx - mn;
    const float safe = delta > 0.0f ? delta : 1.0f;
    const float inv = 1.0f / safe;
    // Channel priority r > g > b on ties, matching the vector blend order.
    float h = (r >= g && r >= b) ? (g - b) * inv
            : (g >= b)           ? std::fmaf(b - r, inv, 2.0f)
                                 : std::fmaf(r - g, inv, 4.0f);
    h = h < 0.0f ? h + 6.0f : h;
    h = delta > 0.0f ? h : 0.0f;
    const float exg = 2.0f * g - r - b;
    return {h, exg};
}

inline float hue6_wrap_dist(float a, float b) {
    float d = a - b;
    d = d < 0.0f ? -d : d;
    const float w = 6.0f - d;
    return d < w ? d : w;
}

inline PixelScores segment_one_impl(uint8_t r, uint8_t g, uint8_t b,
                                    const SegmenterParams& p) {
    const HueExg f = hue_exg(r, g, b);
    const float inv6 = 1.0f / 6.0f;
    float score[3];
    for (int c = 0; c < 3; ++c) {
        const float dh = hue6_wrap_dist(f.hue6, p.proto_hue6[c]) * inv6;
        const float de = f.exg - p.proto_exg[c];
        const float d2 = std::fmaf(dh, dh, de * de);
        score[c] = fast_expf_impl(-d2 * p.inv_two_sigma_sq);
    }
    float m = score[0];
    m = score[1] > m ? score[1] : m;
    m = score[2] > m ? score[2] : m;
    float e[3];
    float sum = 0.0f;
    for (int c = 0; c < 3; ++c) {
        e[c] = fast_expf_impl((score[c] - m) * p.inv_temperature);
        sum += e[c];
    }
    const float invsum = 1.0f / sum;
    PixelScores out{};
    float best = -1.0f;
    for (int c = 0; c < 3; ++c) {
        out.s[c] = e[c] * invsum;
        if (out.s[c] > best) {  // strict >: ties keep the lower index
            best = out.s[c];
            out.cls = static_cast<uint8_t>(c);
        }
    }
    out.prob = best;
    return out;
}

inline float ssim_one_impl(float mu_a, float mu_b, float mu_aa, float mu_bb,
                           float mu_ab, float c1, float c2) {
    const float mua_mub = mu_a * mu_b;
    const float var_a = mu_aa - mu_a * mu_a;
    const float var_b = mu_bb - mu_b * mu_b;
    const float cov = mu_ab - mua_mub;
    const float num = (2.0f * mua_mub + c1) * (2.0f * cov + c2);
    const float den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
    return num / den;
}

inline constexpr float kLumaR = 0.299f;
inline constexpr float kLumaG = 0.587f;
inline constexpr float kLumaB = 0.114f;

inline float luma_one(uint8_t r, uint8_t g, uint8_t b) {
    float y = kLumaR * static_cast<float>(r);
    y = std::fmaf(kLumaG, static_cast<float>(g), y);
    y = std::fmaf(kLumaB, static_cast<float>(b), y);
    return y;
}

// Box mean finalisation: integer tap sum -> float multiply by 1/k -> round to
// nearest even. Both backends use exactly this sequence.
inline uint8_t box_finalize(uint32_t sum, float inv_k) {
    const float v = static_cast<float>(sum) * inv_k;
    const float rounded = (v + kRoundMagic) - kRoundMagic;
    return static_cast<uint8_t>(rounded);
}

}  // namespace fieldscan::kernels::detail
