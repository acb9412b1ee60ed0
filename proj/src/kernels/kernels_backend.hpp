#pragma once

#include "fieldscan/kernels.hpp"

namespace fieldscan::kernels {

// Function-pointer table one backend fills in.
struct BackendOps {
    void (*segment_pixels)(const uint8_t*, const uint8_t*, const uint8_t*,
                           size_t, const SegmenterParams&, float*, float*,
                           float*, uint8_t*, float*);
    void (*box_blur_axis_u8)(const uint8_t*, uint8_t*, int, int, int, int, bool);
    void (*luma601_f32)(const uint8_t*, float*, size_t);
    void (*sep_filter11_f32)(const float*, float*, float*, int, int, const float*);
    void (*ssim_combine_f32)(const float*, const float*, const float*,
                             const float*, const float*, float*, size_t, float,
                             float);
};

const BackendOps& scalar_ops();

#if defined(__x86_64__) || defined(_M_X64)
#define FIELDSCAN_HAVE_AVX2_BACKEND 1
const BackendOps& avx2_ops();
#else
#define FIELDSCAN_HAVE_AVX2_BACKEND 0
#endif

}  // namespace fieldscan::kernels
