#pragma once

#include <functional>
#include <vector>

#include "fieldscan/controller.hpp"
#include "fieldscan/planner.hpp"
#include "fieldscan/sensor.hpp"

namespace fieldscan::mission {

enum class Mode { adaptive, baseline };

struct MissionConfig {
    controller::ControllerConfig controller;
    sensor::CameraModel camera;
    sensor::BlurLaw blur;
    double t_max = 1200.0;  // seconds
    Mode mode = Mode::adaptive;
    bool keep_images = false;  // retain capture pixels in the log (tests only)

    void validate() const;
    // True when one interval at top speed can outrun the footprint height,
    // i.e. along-track gaps are possible.
    bool along_track_gap_possible() const;
};

struct MissionLog {
    std::vector<sensor::CaptureMeta> captures;      // the trajectory tau
    std::vector<controller::ControllerDecision> decisions;  // empty in baseline
    std::vector<ImageU8> images;                    // only when keep_images
    double duration_s = 0.0;   // C(tau) = steps * dt
    double distance_m = 0.0;   // polyline distance actually flown
    bool completed = false;    // path end reached before T_max
    bool gap_warning = false;
};

// Closed-loop run of the adaptive scheme: capture, segment, compute
// cr/cl, gain, clipped speed update, advance by s*dt.
MissionLog run_adaptive(const worldgen::FieldWorld& world,
                        const planner::CoveragePlan& plan,
                        const MissionConfig& config,
                        const perception::Segmenter& segmenter);

// Constant-speed reference over the identical plan; captures are still
// blurred with the nominal-speed kernel. No segmentation happens.
MissionLog run_baseline(const worldgen::FieldWorld& world,
                        const planner::CoveragePlan& plan,
                        const MissionConfig& config);

// Inset rectangle of the field extent that keeps every footprint inside the
// raster (half a footprint plus one pixel of slack per side).
void mission_extent(const worldgen::FieldWorld& world,
                    const sensor::CameraModel& camera, Vec2* lo, Vec2* hi);

// Clips the survey polygon to the mission extent; planning over the result
// guarantees every capture stays inside the raster.
geometry::Polygon mission_polygon(const geometry::Polygon& poly,
                                  const worldgen::FieldWorld& world,
                                  const sensor::CameraModel& camera);

}  // namespace fieldscan::mission
