// AVX2 variants. Lanes execute the same operation sequence as the scalar
// reference (kernels_detail.hpp): explicit FMA ends up as vfmadd, divisions
// and square-root-free math are IEEE single-rounded, and the fast-exp shares
// one polynomial, so outputs are bit-identical to the scalar backend.

#include <immintrin.h>

#include <algorithm>

#include "kernels_backend.hpp"
#include "kernels_detail.hpp"

#if FIELDSCAN_HAVE_AVX2_BACKEND

namespace fieldscan::kernels {

namespace {

namespace d = detail;

inline __m256 fast_expf8(__m256 x) {
    const __m256 lo = _mm256_set1_ps(d::kExpClampLo);
    const __m256 hi = _mm256_set1_ps(d::kExpClampHi);
    const __m256 magic = _mm256_set1_ps(d::kRoundMagic);
    x = _mm256_max_ps(x, lo);
    x = _mm256_min_ps(x, hi);
    const __m256 z = _mm256_fmadd_ps(x, _mm256_set1_ps(d::kLog2E), magic);
    const __m256 n = _mm256_sub_ps(z, magic);
    __m256 r = _mm256_fmadd_ps(n, _mm256_set1_ps(-d::kLn2Hi), x);
    r = _mm256_fmadd_ps(n, _mm256_set1_ps(-d::kLn2Lo), r);
    __m256 p = _mm256_set1_ps(d::kExpP0);
    p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(d::kExpP1));
    p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(d::kExpP2));
    p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(d::kExpP3));
    p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(d::kExpP4));
    p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(d::kExpP5));
    const __m256 rr = _mm256_mul_ps(r, r);
    __m256 y = _mm256_fmadd_ps(p, rr, r);
    y = _mm256_add_ps(y, _mm256_set1_ps(1.0f));
    const __m256i ni = _mm256_cvtps_epi32(n);
    const __m256i bits = _mm256_slli_epi32(_mm256_add_epi32(ni, _mm256_set1_epi32(127)), 23);
    return _mm256_mul_ps(y, _mm256_castsi256_ps(bits));
}

inline __m256 load8_u8_ps(const uint8_t* p) {
    const __m128i b = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p));
    return _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(b));
}

inline __m256 abs_ps(__m256 v) {
    return _mm256_andnot_ps(_mm256_set1_ps(-0.0f), v);
}

void segment_pixels_avx2(const uint8_t* r8, const uint8_t* g8, const uint8_t* b8,
                         size_t n, const SegmenterParams& params,
                         float* s0, float* s1, float* s2,
                         uint8_t* cls, float* prob) {
    const __m256 inv255 = _mm256_set1_ps(1.0f / 255.0f);
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 two = _mm256_set1_ps(2.0f);
    const __m256 four = _mm256_set1_ps(4.0f);
    const __m256 six = _mm256_set1_ps(6.0f);
    const __m256 inv6 = _mm256_set1_ps(1.0f / 6.0f);
    const __m256 inv2s2 = _mm256_set1_ps(params.inv_two_sigma_sq);
    const __m256 invT = _mm256_set1_ps(params.inv_temperature);

    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 r = _mm256_mul_ps(load8_u8_ps(r8 + i), inv255);
        const __m256 g = _mm256_mul_ps(load8_u8_ps(g8 + i), inv255);
        const __m256 b = _mm256_mul_ps(load8_u8_ps(b8 + i), inv255);

        const __m256 mx = _mm256_max_ps(r, _mm256_max_ps(g, b));
        const __m256 mn = _mm256_min_ps(r, _mm256_min_ps(g, b));
        const __m256 delta = _mm256_sub_ps(mx, mn);
        const __m256 chroma_mask = _mm256_cmp_ps(delta, zero, _CMP_GT_OQ);
        const __m256 safe = _mm256_blendv_ps(one, delta, chroma_mask);
        const __m256 inv = _mm256_div_ps(one, safe);

        const __m256 hr = _mm256_mul_ps(_mm256_sub_ps(g, b), inv);
        const __m256 hg = _mm256_fmadd_ps(_mm256_sub_ps(b, r), inv, two);
        const __m256 hb = _mm256_fmadd_ps(_mm256_sub_ps(r, g), inv, four);
        const __m256 sel_r = _mm256_and_ps(_mm256_cmp_ps(r, g, _CMP_GE_OQ),
                                           _mm256_cmp_ps(r, b, _CMP_GE_OQ));
        const __m256 sel_g = _mm256_cmp_ps(g, b, _CMP_GE_OQ);
        __m256 h = _mm256_blendv_ps(_mm256_blendv_ps(hb, hg, sel_g), hr, sel_r);
        h = _mm256_blendv_ps(h, _mm256_add_ps(h, six),
                             _mm256_cmp_ps(h, zero, _CMP_LT_OQ));
        h = _mm256_blendv_ps(zero, h, chroma_mask);

        const __m256 exg = _mm256_sub_ps(_mm256_sub_ps(_mm256_mul_ps(two, g), r), b);

        __m256 score[3];
        for (int c = 0; c < 3; ++c) {
            __m256 dh = abs_ps(_mm256_sub_ps(h, _mm256_set1_ps(params.proto_hue6[c])));
            dh = _mm256_min_ps(dh, _mm256_sub_ps(six, dh));
            dh = _mm256_mul_ps(dh, inv6);
            const __m256 de = _mm256_sub_ps(exg, _mm256_set1_ps(params.proto_exg[c]));
            const __m256 d2 = _mm256_fmadd_ps(dh, dh, _mm256_mul_ps(de, de));
            const __m256 neg_d2 = _mm256_xor_ps(d2, _mm256_set1_ps(-0.0f));
            score[c] = fast_expf8(_mm256_mul_ps(neg_d2, inv2s2));
        }

        __m256 m = score[0];
        m = _mm256_blendv_ps(m, score[1], _mm256_cmp_ps(score[1], m, _CMP_GT_OQ));
        m = _mm256_blendv_ps(m, score[2], _mm256_cmp_ps(score[2], m, _CMP_GT_OQ));

        __m256 e[3];
        __m256 sum = zero;
        for (int c = 0; c < 3; ++c) {
            e[c] = fast_expf8(_mm256_mul_ps(_mm256_sub_ps(score[c], m), invT));
            sum = _mm256_add_ps(sum, e[c]);
        }
        const __m256 invsum = _mm256_div_ps(one, sum);
        const __m256 p0 = _mm256_mul_ps(e[0], invsum);
        const __m256 p1 = _mm256_mul_ps(e[1], invsum);
        const __m256 p2 = _mm256_mul_ps(e[2], invsum);

        __m256 best = p0;
        __m256i idx = _mm256_setzero_si256();
        const __m256 m1 = _mm256_cmp_ps(p1, best, _CMP_GT_OQ);
        best = _mm256_blendv_ps(best, p1, m1);
        idx = _mm256_blendv_epi8(idx, _mm256_set1_epi32(1), _mm256_castps_si256(m1));
        const __m256 m2 = _mm256_cmp_ps(p2, best, _CMP_GT_OQ);
        best = _mm256_blendv_ps(best, p2, m2);
        idx = _mm256_blendv_epi8(idx, _mm256_set1_epi32(2), _mm256_castps_si256(m2));

        _mm256_storeu_ps(s0 + i, p0);
        _mm256_storeu_ps(s1 + i, p1);
        _mm256_storeu_ps(s2 + i, p2);
        _mm256_storeu_ps(prob + i, best);
        alignas(32) int32_t lanes[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), idx);
        for (int j = 0; j < 8; ++j) cls[i + j] = static_cast<uint8_t>(lanes[j]);
    }
    for (; i < n; ++i) {
        const d::PixelScores px = d::segment_one_impl(r8[i], g8[i], b8[i], params);
        s0[i] = px.s[0];
        s1[i] = px.s[1];
        s2[i] = px.s[2];
        cls[i] = px.cls;
        prob[i] = px.prob;
    }
}

// Finalize 16 u16 tap sums into 16 u8 box means (same float sequence as
// detail::box_finalize).
inline void box_store16(__m256i sums16, float inv_k, uint8_t* out) {
    const __m256 magic = _mm256_set1_ps(d::kRoundMagic);
    const __m256 vinv = _mm256_set1_ps(inv_k);
    const __m256i lo32 = _mm256_cvtepu16_epi32(_mm256_castsi256_si128(sums16));
    const __m256i hi32 = _mm256_cvtepu16_epi32(_mm256_extracti128_si256(sums16, 1));
    auto finalize8 = [&](__m256i v32) {
        const __m256 v = _mm256_mul_ps(_mm256_cvtepi32_ps(v32), vinv);
        const __m256 rounded = _mm256_sub_ps(_mm256_add_ps(v, magic), magic);
        return _mm256_cvtps_epi32(rounded);
    };
    const __m256i a = finalize8(lo32);
    const __m256i b = finalize8(hi32);
    __m256i packed = _mm256_packus_epi32(a, b);
    packed = _mm256_permute4x64_epi64(packed, 0b11011000);
    packed = _mm256_packus_epi16(packed, packed);
    packed = _mm256_permute4x64_epi64(packed, 0b00001000);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out),
                     _mm256_castsi256_si128(packed));
}

inline uint8_t box_one_clamped(const uint8_t* base, int pos, int lo, int hi,
                               int step, int radius, float inv_k) {
    uint32_t sum = 0;
    for (int j = -radius; j <= radius; ++j) {
        const int q = std::clamp(pos + j, lo, hi);
        sum += base[static_cast<size_t>(q) * step];
    }
    return d::box_finalize(sum, inv_k);
}

void box_blur_axis_u8_avx2(const uint8_t* src, uint8_t* dst, int width,
                           int height, int channels, int k, bool horizontal) {
    const int radius = k / 2;
    const float inv_k = 1.0f / static_cast<float>(k);
    const int row_stride = width * channels;
    if (horizontal) {
        const int tap_step = channels;
        const int first_safe = radius * channels;
        const int last_safe = row_stride - radius * channels;  // exclusive
        for (int y = 0; y < height; ++y) {
            const uint8_t* row = src + static_cast<size_t>(y) * row_stride;
            uint8_t* out = dst + static_cast<size_t>(y) * row_stride;
            int b = 0;
            for (; b < std::min(first_safe, row_stride); ++b) {
                const int x = b / channels, c = b % channels;
                out[b] = box_one_clamped(row + c, x, 0, width - 1, channels, radius, inv_k);
            }
            for (; b + 16 <= last_safe; b += 16) {
                __m256i sum = _mm256_setzero_si256();
                for (int j = -radius; j <= radius; ++j) {
                    const __m128i bytes = _mm_loadu_si128(
                        reinterpret_cast<const __m128i*>(row + b + j * tap_step));
                    sum = _mm256_add_epi16(sum, _mm256_cvtepu8_epi16(bytes));
                }
                box_store16(sum, inv_k, out + b);
            }
            for (; b < row_stride; ++b) {
                const int x = b / channels, c = b % channels;
                out[b] = box_one_clamped(row + c, x, 0, width - 1, channels, radius, inv_k);
            }
        }
    } else {
        for (int y = 0; y < height; ++y) {
            uint8_t* out = dst + static_cast<size_t>(y) * row_stride;
            const bool interior = (y - radius >= 0) && (y + radius < height);
            if (!interior) {
                for (int b = 0; b < row_stride; ++b)
                    out[b] = box_one_clamped(src + b, y, 0, height - 1, row_stride,
                                             radius, inv_k);
                continue;
            }
            const uint8_t* base = src + static_cast<size_t>(y - radius) * row_stride;
            int b = 0;
            for (; b + 16 <= row_stride; b += 16) {
                __m256i sum = _mm256_setzero_si256();
                const uint8_t* p = base + b;
                for (int j = 0; j < k; ++j) {
                    const __m128i bytes =
                        _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
                    sum = _mm256_add_epi16(sum, _mm256_cvtepu8_epi16(bytes));
                    p += row_stride;
                }
                box_store16(sum, inv_k, out + b);
            }
            for (; b < row_stride; ++b)
                out[b] = box_one_clamped(src + b, y, 0, height - 1, row_stride,
                                         radius, inv_k);
        }
    }
}

void luma601_f32_avx2(const uint8_t* rgb, float* out, size_t n) {
    const __m256 kr = _mm256_set1_ps(d::kLumaR);
    const __m256 kg = _mm256_set1_ps(d::kLumaG);
    const __m256 kb = _mm256_set1_ps(d::kLumaB);
    // Deinterleave 8 RGB pixels (24 bytes) into r/g/b byte groups.
    const __m128i shuf_lo_r = _mm_setr_epi8(0, 3, 6, 9, 12, 15, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i shuf_hi_r = _mm_setr_epi8(-1, -1, -1, -1, -1, -1, 2, 5, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i shuf_lo_g = _mm_setr_epi8(1, 4, 7, 10, 13, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i shuf_hi_g = _mm_setr_epi8(-1, -1, -1, -1, -1, 0, 3, 6, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i shuf_lo_b = _mm_setr_epi8(2, 5, 8, 11, 14, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i shuf_hi_b = _mm_setr_epi8(-1, -1, -1, -1, -1, 1, 4, 7, -1, -1, -1, -1, -1, -1, -1, -1);

    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const uint8_t* p = rgb + 3 * i;
        // Last block may not have 32 readable bytes; 24 are guaranteed.
        const __m128i lo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
        const __m128i hi = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p + 16));
        const __m128i r = _mm_or_si128(_mm_shuffle_epi8(lo, shuf_lo_r),
                                       _mm_shuffle_epi8(hi, shuf_hi_r));
        const __m128i g = _mm_or_si128(_mm_shuffle_epi8(lo, shuf_lo_g),
                                       _mm_shuffle_epi8(hi, shuf_hi_g));
        const __m128i b = _mm_or_si128(_mm_shuffle_epi8(lo, shuf_lo_b),
                                       _mm_shuffle_epi8(hi, shuf_hi_b));
        const __m256 rf = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(r));
        const __m256 gf = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(g));
        const __m256 bf = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(b));
        __m256 y = _mm256_mul_ps(kr, rf);
        y = _mm256_fmadd_ps(kg, gf, y);
        y = _mm256_fmadd_ps(kb, bf, y);
        _mm256_storeu_ps(out + i, y);
    }
    for (; i < n; ++i)
        out[i] = d::luma_one(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
}

void filter11_h_avx2(const float* src, float* dst, int width, int height,
                     const float taps[11]) {
    for (int y = 0; y < height; ++y) {
        const float* row = src + static_cast<size_t>(y) * width;
        float* out = dst + static_cast<size_t>(y) * width;
        int x = 0;
        for (; x < std::min(5, width); ++x) {
            float acc = 0.0f;
            for (int j = -5; j <= 5; ++j)
                acc = std::fmaf(taps[j + 5], row[std::clamp(x + j, 0, width - 1)], acc);
            out[x] = acc;
        }
        for (; x + 8 <= width - 5; x += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int j = 0; j < 11; ++j)
                acc = _mm256_fmadd_ps(_mm256_set1_ps(taps[j]),
                                      _mm256_loadu_ps(row + x + j - 5), acc);
            _mm256_storeu_ps(out + x, acc);
        }
        for (; x < width; ++x) {
            float acc = 0.0f;
            for (int j = -5; j <= 5; ++j)
                acc = std::fmaf(taps[j + 5], row[std::clamp(x + j, 0, width - 1)], acc);
            out[x] = acc;
        }
    }
}

void filter11_v_avx2(const float* src, float* dst, int width, int height,
                     const float taps[11]) {
    for (int y = 0; y < height; ++y) {
        float* out = dst + static_cast<size_t>(y) * width;
        const float* rows[11];
        for (int j = -5; j <= 5; ++j)
            rows[j + 5] = src + static_cast<size_t>(std::clamp(y + j, 0, height - 1)) * width;
        int x = 0;
        for (; x + 8 <= width; x += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int j = 0; j < 11; ++j)
                acc = _mm256_fmadd_ps(_mm256_set1_ps(taps[j]),
                                      _mm256_loadu_ps(rows[j] + x), acc);
            _mm256_storeu_ps(out + x, acc);
        }
        for (; x < width; ++x) {
            float acc = 0.0f;
            for (int j = 0; j < 11; ++j) acc = std::fmaf(taps[j], rows[j][x], acc);
            out[x] = acc;
        }
    }
}

void sep_filter11_f32_avx2(const float* src, float* tmp, float* dst, int width,
                           int height, const float taps[11]) {
    filter11_h_avx2(src, tmp, width, height, taps);
    filter11_v_avx2(tmp, dst, width, height, taps);
}

void ssim_combine_f32_avx2(const float* mu_a, const float* mu_b,
                           const float* mu_aa, const float* mu_bb,
                           const float* mu_ab, float* out, size_t n, float c1,
                           float c2) {
    const __m256 vc1 = _mm256_set1_ps(c1);
    const __m256 vc2 = _mm256_set1_ps(c2);
    const __m256 two = _mm256_set1_ps(2.0f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 ma = _mm256_loadu_ps(mu_a + i);
        const __m256 mb = _mm256_loadu_ps(mu_b + i);
        const __m256 maa = _mm256_loadu_ps(mu_aa + i);
        const __m256 mbb = _mm256_loadu_ps(mu_bb + i);
        const __m256 mab = _mm256_loadu_ps(mu_ab + i);
        const __m256 mamb = _mm256_mul_ps(ma, mb);
        const __m256 var_a = _mm256_sub_ps(maa, _mm256_mul_ps(ma, ma));
        const __m256 var_b = _mm256_sub_ps(mbb, _mm256_mul_ps(mb, mb));
        const __m256 cov = _mm256_sub_ps(mab, mamb);
        const __m256 num =
            _mm256_mul_ps(_mm256_add_ps(_mm256_mul_ps(two, mamb), vc1),
                          _mm256_add_ps(_mm256_mul_ps(two, cov), vc2));
        const __m256 den = _mm256_mul_ps(
            _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(ma, ma), _mm256_mul_ps(mb, mb)), vc1),
            _mm256_add_ps(_mm256_add_ps(var_a, var_b), vc2));
        _mm256_storeu_ps(out + i, _mm256_div_ps(num, den));
    }
    for (; i < n; ++i)
        out[i] = d::ssim_one_impl(mu_a[i], mu_b[i], mu_aa[i], mu_bb[i], mu_ab[i], c1, c2);
}

}  // namespace

const BackendOps& avx2_ops() {
    static const BackendOps ops{
        segment_pixels_avx2, box_blur_axis_u8_avx2, luma601_f32_avx2,
        sep_filter11_f32_avx2, ssim_combine_f32_avx2,
    };
    return ops;
}

}  // namespace fieldscan::kernels

#endif  // FIELDSCAN_HAVE_AVX2_BACKEND
