#include "fieldscan/perception.hpp"

#include <cmath>

#include "fieldscan/kernels.hpp"

namespace fieldscan::perception {

void SegmenterConfig::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("segmenter sigma must be > 0");
    if (!(temperature > 0.0)) throw ValidationError("segmenter temperature must be > 0");
    for (const ClassPrototype& p : prototypes) {
        if (p.hue_deg < 0.0 || p.hue_deg >= 360.0)
            throw ValidationError("prototype hue must be in [0, 360)");
        if (p.exg < -2.0 || p.exg > 2.0)
            throw ValidationError("prototype excess-green must be in [-2, 2]");
    }
}

ClassPrototype prototype_from_rgb(uint8_t r8, uint8_t g8, uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
        if (r >= g && r >= b) h = (g - b) / delta;
        else if (g >= b) h = (b - r) / delta + 2.0;
        else h = (r - g) / delta + 4.0;
        if (h < 0.0) h += 6.0;
    }
    return {h * 60.0, 2.0 * g - r - b};
}

SegmenterConfig SegmenterConfig::defaults() {
    SegmenterConfig cfg;
    // Feature-space positions of worldgen's default class colors.
    cfg.prototypes[kClassBackground] = prototype_from_rgb(120, 90, 60);
    cfg.prototypes[kClassCrop] = prototype_from_rgb(40, 140, 50);
    cfg.prototypes[kClassWeed] = prototype_from_rgb(110, 160, 30);
    return cfg;
}

PrototypeSegmenter::PrototypeSegmenter(SegmenterConfig config)
    : config_(config) {
    config_.validate();
}

SegmentationResult PrototypeSegmenter::segment(const ImageU8& image) const {
    if (image.width <= 0 || image.height <= 0 || image.data.empty())
        throw ValidationError("cannot segment an empty image");
    if (image.channels != 3)
        throw ValidationError("segmenter expects an RGB image");

    const size_t n = image.pixel_count();
    std::vector<uint8_t> r(n), g(n), b(n);
    for (size_t i = 0; i < n; ++i) {
        r[i] = image.data[3 * i + 0];
        g[i] = image.data[3 * i + 1];
        b[i] = image.data[3 * i + 2];
    }

    kernels::SegmenterParams params;
    for (int c = 0; c < 3; ++c) {
        params.proto_hue6[c] = static_cast<float>(config_.prototypes[c].hue_deg / 60.0);
        params.proto_exg[c] = static_cast<float>(config_.prototypes[c].exg);
    }
    params.inv_two_sigma_sq = static_cast<float>(1.0 / (2.0 * config_.sigma * config_.sigma));
    params.inv_temperature = static_cast<float>(1.0 / config_.temperature);

    SegmentationResult out;
    for (auto& plane : out.scores) plane = ImageF32(image.width, image.height, 1);
    out.class_map = ImageU8(image.width, image.height, 1);
    out.prob_map = ImageF32(image.width, image.height, 1);

    kernels::segment_pixels(r.data(), g.data(), b.data(), n, params,
                            out.scores[0].data.data(), out.scores[1].data.data(),
                            out.scores[2].data.data(), out.class_map.data.data(),
                            out.prob_map.data.data());

    for (uint8_t c : out.class_map.data) {
        if (c == kClassBackground) ++out.n_background;
        else if (c == kClassCrop) ++out.n_crop;
        else ++out.n_weed;
    }
    return out;
}

std::unique_ptr<Segmenter> make_segmenter(const std::string& name,
                                          const SegmenterConfig& config) {
    if (name == "prototype")
        return std::make_unique<PrototypeSegmenter>(config);
    throw ValidationError("unknown segmenter: " + name);
}

void validate_segmentation(const SegmentationResult& result, int expected_width,
                           int expected_height) {
    const auto fail = [](const std::string& what) {
        throw ValidationError("segmenter contract violation: " + what);
    };
    if (result.width() != expected_width || result.height() != expected_height)
        fail("output dims " + std::to_string(result.width()) + "x" +
             std::to_string(result.height()) + " do not match input " +
             std::to_string(expected_width) + "x" + std::to_string(expected_height));
    for (const ImageF32& plane : result.scores)
        if (plane.width != expected_width || plane.height != expected_height)
            fail("score plane dims do not match the class map");
    if (result.prob_map.width != expected_width || result.prob_map.height != expected_height)
        fail("prob map dims do not match the class map");

    const size_t n = result.class_map.pixel_count();
    int64_t counts[3] = {0, 0, 0};
    for (size_t i = 0; i < n; ++i) {
        const float s0 = result.scores[0].data[i];
        const float s1 = result.scores[1].data[i];
        const float s2 = result.scores[2].data[i];
        if (s0 < 0.f || s0 > 1.f || s1 < 0.f || s1 > 1.f || s2 < 0.f || s2 > 1.f)
            fail("score outside [0,1] at pixel " + std::to_string(i));
        const float sum = s0 + s1 + s2;
        if (std::abs(sum - 1.0f) > 1e-6f)
            fail("channel sum " + std::to_string(sum) + " at pixel " + std::to_string(i));
        const uint8_t cls = result.class_map.data[i];
        if (cls > 2) fail("class id outside {0,1,2} at pixel " + std::to_string(i));
        const float s[3] = {s0, s1, s2};
        float mx = s0;
        int arg = 0;
        if (s1 > mx) { mx = s1; arg = 1; }
        if (s2 > mx) { mx = s2; arg = 2; }
        if (std::abs(s[cls] - mx) > 1e-6f)
            fail("class map is not the score argmax at pixel " + std::to_string(i));
        (void)arg;
        const float prob = result.prob_map.data[i];
        if (std::abs(prob - mx) > 1e-6f)
            fail("prob map is not the max score at pixel " + std::to_string(i));
        if (prob < 1.0f / 3.0f - 1e-6f)
            fail("prob below the 3-way floor at pixel " + std::to_string(i));
        ++counts[cls];
    }
    if (counts[0] != result.n_background || counts[1] != result.n_crop ||
        counts[2] != result.n_weed)
        fail("class counts do not match the class map");
    if (counts[0] + counts[1] + counts[2] != static_cast<int64_t>(n))
        fail("class counts do not sum to the pixel count");
}

}  // namespace fieldscan::perception
