#pragma once

#include <array>
#include <memory>
#include <string>

#include "fieldscan/common.hpp"

namespace fieldscan::perception {

inline constexpr int kClassBackground = 0;
inline constexpr int kClassCrop = 1;
inline constexpr int kClassWeed = 2;

struct ClassPrototype {
    double hue_deg = 0.0;   // [0, 360)
    double exg = 0.0;       // 2g - r - b on [0,1] channels, in [-2, 2]
};

struct SegmenterConfig {
    std::array<ClassPrototype, 3> prototypes;  // (background, crop, weed)
    double sigma = 0.16;        // feature-space kernel bandwidth
    double temperature = 0.055; // softmax temperature

    void validate() const;
    static SegmenterConfig defaults();
};

struct SegmentationResult {
    // Per-class score planes, channels ordered (background, crop, weed);
    // per-pixel values sum to 1 within 1e-6.
    std::array<ImageF32, 3> scores;
    ImageU8 class_map;   // argmax, ties toward the lower class index
    ImageF32 prob_map;   // max score, >= 1/3 up to float rounding
    int64_t n_background = 0;
    int64_t n_crop = 0;
    int64_t n_weed = 0;

    int width() const { return class_map.width; }
    int height() const { return class_map.height; }
    int64_t count(int cls) const {
        return cls == 0 ? n_background : cls == 1 ? n_crop : n_weed;
    }
};

// Interface every segmenter must satisfy; the mission validates each result
// against the SegmentationResult invariants and aborts on violations.
class Segmenter {
public:
    virtual ~Segmenter() = default;
    virtual SegmentationResult segment(const ImageU8& image) const = 0;
    virtual std::string name() const = 0;
};

// Pixel-wise generative-prototype classifier: per-pixel (hue, excess-green)
// features, Gaussian score against each class prototype, softmax.
class PrototypeSegmenter final : public Segmenter {
public:
    explicit PrototypeSegmenter(SegmenterConfig config);
    SegmentationResult segment(const ImageU8& image) const override;
    std::string name() const override { return "prototype"; }
    const SegmenterConfig& config() const { return config_; }

private:
    SegmenterConfig config_;
};

std::unique_ptr<Segmenter> make_segmenter(const std::string& name,
                                          const SegmenterConfig& config);

// Feature-space position of an RGB color (hue in degrees, excess-green),
// the same math the pixel kernel applies.
ClassPrototype prototype_from_rgb(uint8_t r, uint8_t g, uint8_t b);

// Contract check for segmenter outputs (channel sums, argmax/max
// consistency, probability floor, count totals). Throws ValidationError with
// diagnostics on the first violation.
void validate_segmentation(const SegmentationResult& result, int expected_width,
                           int expected_height);

}  // namespace fieldscan::perception
