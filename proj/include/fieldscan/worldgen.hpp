#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fieldscan/geometry.hpp"

namespace fieldscan::worldgen {

inline constexpr uint8_t kLabelBackground = 0;
inline constexpr uint8_t kLabelCrop = 1;
inline constexpr uint8_t kLabelWeed = 2;

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// Named axis-aligned rectangle; used both for spatially varying weed density
// and for region-conditioned mission statistics.
struct Region {
    std::string name;
    Vec2 lo;
    Vec2 hi;
    std::optional<double> weed_density;  // blobs per m^2 inside the rect
};

struct FieldSpec {
    double width_m = 80.0;
    double height_m = 60.0;
    double gsd = 0.02;
    uint64_t seed = 1;

    double row_spacing_m = 0.8;
    double plant_spacing_m = 0.9;
    double plant_radius_m = 0.30;
    double plant_jitter = 0.25;  // fraction of the spacing

    double weed_density = 0.0;  // blobs per m^2 over the whole field
    double weed_radius_m = 0.22;

    Rgb soil_color{120, 90, 60};
    Rgb crop_color{40, 140, 50};
    Rgb weed_color{110, 160, 30};
    double noise_sigma = 12.0;

    std::vector<Region> regions;
    std::string crop_region;  // empty: rows span the whole field

    void validate() const;
    const Region* find_region(const std::string& name) const;
};

struct FieldWorld {
    geometry::FieldFrame frame;
    ImageU8 orthophoto;  // RGB
    ImageU8 labels;      // {0,1,2}

    void validate() const;
    uint64_t content_hash() const;
};

FieldWorld generate_field(const FieldSpec& spec);

FieldWorld load_field(const std::string& orthophoto_path,
                      const std::string& labels_path, double gsd);

}  // namespace fieldscan::worldgen
