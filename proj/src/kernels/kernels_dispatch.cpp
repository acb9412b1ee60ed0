#include <cstdlib>
#include <stdexcept>

#include "fieldscan/common.hpp"
#include "kernels_backend.hpp"

namespace fieldscan::kernels {

namespace {

bool cpu_has_avx2() {
#if FIELDSCAN_HAVE_AVX2_BACKEND
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend resolve_default() {
    if (const char* env = std::getenv("FIELDSCAN_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2") {
            if (!cpu_has_avx2())
                throw ValidationError("FIELDSCAN_KERNELS=avx2 but the CPU lacks AVX2/FMA");
            return Backend::avx2;
        }
        throw ValidationError("unknown FIELDSCAN_KERNELS value: " + want);
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend& current() {
    static Backend backend = resolve_default();
    return backend;
}

const BackendOps& ops_for(Backend b) {
#if FIELDSCAN_HAVE_AVX2_BACKEND
    if (b == Backend::avx2) return avx2_ops();
#endif
    return scalar_ops();
}

const BackendOps& ops() { return ops_for(current()); }

}  // namespace

bool backend_supported(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

Backend active_backend() { return current(); }

Backend default_backend() { return resolve_default(); }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw ValidationError("kernel backend not supported on this CPU: " + backend_name(b));
    current() = b;
}

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void segment_pixels(const uint8_t* r, const uint8_t* g, const uint8_t* b,
                    size_t n, const SegmenterParams& params, float* s0,
                    float* s1, float* s2, uint8_t* cls, float* prob) {
    ops().segment_pixels(r, g, b, n, params, s0, s1, s2, cls, prob);
}

void box_blur_axis_u8(const uint8_t* src, uint8_t* dst, int width, int height,
                      int channels, int k, bool horizontal) {
    if (k < 1 || k % 2 == 0)
        throw ValidationError("blur kernel length must be a positive odd integer");
    ops().box_blur_axis_u8(src, dst, width, height, channels, k, horizontal);
}

void luma601_f32(const uint8_t* rgb, float* out, size_t n) {
    ops().luma601_f32(rgb, out, n);
}

void sep_filter11_f32(const float* src, float* tmp, float* dst, int width,
                      int height, const float taps[11]) {
    ops().sep_filter11_f32(src, tmp, dst, width, height, taps);
}

void ssim_combine_f32(const float* mu_a, const float* mu_b, const float* mu_aa,
                      const float* mu_bb, const float* mu_ab, float* out,
                      size_t n, float c1, float c2) {
    ops().ssim_combine_f32(mu_a, mu_b, mu_aa, mu_bb, mu_ab, out, n, c1, c2);
}

}  // namespace fieldscan::kernels
