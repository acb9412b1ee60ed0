#pragma once

#include <optional>
#include <string>

#include "fieldscan/evaluation.hpp"

namespace fieldscan::config {

// Aggregated run configuration. The file format is a plain-text INI dialect
// ('key = value' under '[section]' headers, '#' comments); docs/config.md is
// the schema reference. Unknown sections or keys are rejected.
struct RunConfig {
    worldgen::FieldSpec field;
    std::string orthophoto_path;  // both set: import instead of generating
    std::string labels_path;

    std::optional<geometry::Polygon> polygon;  // default: whole field rect

    int image_width = 640;
    int image_height = 480;
    double altitude_m = 10.0;
    double dt = 1.0;

    sensor::BlurLaw blur;
    double overlap = 0.70;

    controller::ControllerConfig controller;

    std::string segmenter_name = "prototype";
    perception::SegmenterConfig segmenter;

    mission::Mode mode = mission::Mode::adaptive;
    double t_max = 1200.0;
    bool dump_captures = false;

    double alpha = 0.001;
    bool export_scores = false;

    std::string output_dir;

    void validate() const;

    sensor::CameraModel make_camera() const {
        return sensor::CameraModel::create(image_width, image_height, altitude_m,
                                           dt, field.gsd);
    }
    geometry::Polygon survey_polygon() const;  // explicit polygon or field rect
    mission::MissionConfig make_mission_config() const;
    planner::PlanParams make_plan_params() const;
};

RunConfig default_config();

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source_name);

// Canonical snapshot: every field serialized explicitly; doubles round-trip
// exactly, so re-running from the snapshot reproduces the run byte-for-byte.
std::string to_snapshot(const RunConfig& cfg);

std::string format_double(double v);  // shortest exact decimal form

}  // namespace fieldscan::config
