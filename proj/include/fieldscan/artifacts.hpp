#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fieldscan/config.hpp"

namespace fieldscan::artifacts {

// All artifact writes go through a temp-then-rename so a crashed run never
// leaves a half-written file behind.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);
void atomic_write_png(const std::filesystem::path& path, const ImageU8& img);

std::string decisions_csv(const std::vector<controller::ControllerDecision>& decisions);
std::string captures_csv(const std::vector<sensor::CaptureMeta>& captures);
std::string ssim_histogram_csv(const std::array<int64_t, 32>& histogram);

std::string summary_json(const mission::MissionLog& log, const config::RunConfig& cfg,
                         uint64_t world_hash, size_t plan_waypoints,
                         double plan_length_m);
std::string eval_report_json(const evaluation::EvalReport& report);

// Parsed-back pieces used by compare/sweep.
struct RunInfo {
    std::string dir;
    std::string mode;
    double nominal_speed = 0.0;
    uint64_t seed = 0;
    std::string world_hash;
    double duration_s = 0.0;
    double distance_m = 0.0;
    bool completed = false;
    evaluation::EvalReport report;
    bool has_report = false;
};
RunInfo read_run_dir(const std::filesystem::path& dir);

std::string comparison_csv(const std::vector<RunInfo>& runs);

// Red (low) to blue (high) colormap of an SSIM map.
ImageU8 ssim_colormap(const ImageF32& map);

// Class-map palette: background black, crop green, weed yellow.
void write_class_map_png(const std::filesystem::path& path, const ImageU8& class_map);

// Minimal plot rasterizer for the static report images.
struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> band;  // optional +/- band per point (variance display)
    std::array<uint8_t, 3> color{0, 0, 0};
    std::string label;
};
ImageU8 render_plot(const std::vector<Series>& series, const std::string& title,
                    int width = 900, int height = 560);

}  // namespace fieldscan::artifacts
