#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fieldscan/mission.hpp"

namespace fieldscan::evaluation {

struct Mosaic {
    ImageU8 image;                      // field dims, RGB; unobserved = black
    std::vector<uint8_t> observed;      // per pixel
    std::vector<int32_t> source_index;  // capture index, -1 when unobserved

    double coverage_fraction() const;   // observed / field pixels
};

// Pastes each capture (replayed bit-exactly from the world) into its
// footprint; overlaps resolve most-recent-wins.
Mosaic reconstruct_mosaic(const worldgen::FieldWorld& world,
                          const sensor::CameraModel& camera,
                          const std::vector<sensor::CaptureMeta>& captures);

// Pixels the plan sweeps with the camera footprint (segment-wise rectangle
// union); the denominator for planned-region coverage.
std::vector<uint8_t> planned_region_mask(const planner::CoveragePlan& plan,
                                         const sensor::CameraModel& camera,
                                         const geometry::FieldFrame& frame);

// Per-class intersection over union; both-empty counts as 1.0, exactly one
// empty as 0.0.
double iou(const ImageU8& pred, const ImageU8& truth, uint8_t cls);

struct SsimStats {
    ImageF32 map;
    double mean = 0.0;
    std::array<int64_t, 32> histogram{};  // bins over [0,1], clamped

    double mean_over(const std::vector<uint8_t>& mask) const;
};

// Standard single-scale SSIM on ITU-R 601 luma: Gaussian window 11 taps,
// sigma 1.5, K1=0.01, K2=0.03, dynamic range 255, edge replication.
SsimStats ssim_map(const ImageU8& a, const ImageU8& b);

// (IoU_crop + IoU_weed) / (alpha * C)
double objective(double iou_crop, double iou_weed, double duration_s, double alpha);

// Full-field class map assembled by segmenting camera-sized tiles (the last
// row/column of tiles is zero-padded and cropped back).
ImageU8 segment_tiled(const ImageU8& image, const sensor::CameraModel& camera,
                      const perception::Segmenter& segmenter);

struct RegionStats {
    double mean_speed = 0.0;
    int64_t samples = 0;
    double mean_ssim = 0.0;
};

struct EvalReport {
    double iou_crop = 0.0;
    double iou_weed = 0.0;
    double duration_s = 0.0;
    double objective_value = 0.0;
    bool within_budget = true;  // C <= T_max
    double mean_ssim = 0.0;
    std::array<int64_t, 32> ssim_histogram{};
    double coverage_fraction = 0.0;
    double planned_coverage = 0.0;  // observed pixels inside the swept region
    std::map<std::string, RegionStats> regions;
};

EvalReport evaluate_run(const worldgen::FieldWorld& world,
                        const planner::CoveragePlan& plan,
                        const mission::MissionLog& log,
                        const mission::MissionConfig& config,
                        const perception::Segmenter& segmenter, double alpha,
                        const std::vector<worldgen::Region>& regions,
                        Mosaic* mosaic_out = nullptr,
                        SsimStats* ssim_out = nullptr,
                        ImageU8* class_map_out = nullptr);

}  // namespace fieldscan::evaluation
