#include "fieldscan/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fieldscan/png_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fieldscan::artifacts {

void atomic_write(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void atomic_write_png(const fs::path& path, const ImageU8& img) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    io::write_png(tmp.string(), img);
    fs::rename(tmp, path);
}

namespace {

std::string f9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

std::string f6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string decisions_csv(const std::vector<controller::ControllerDecision>& decisions) {
    std::string out = "i,t,x,y,s_prev,cr,cl,g1,g2,w1,w2,G,u,s_i\n";
    for (const auto& d : decisions) {
        out += std::to_string(d.index) + "," + f6(d.t) + "," + f6(d.pose.x) + "," +
               f6(d.pose.y) + "," + f9(d.speed_prev) + "," + f9(d.cr) + "," +
               f9(d.cl) + "," + f9(d.g1) + "," + f9(d.g2) + "," + f9(d.w1) + "," +
               f9(d.w2) + "," + f9(d.gain) + "," + f9(d.unclipped) + "," +
               f9(d.speed) + "\n";
    }
    return out;
}

std::string captures_csv(const std::vector<sensor::CaptureMeta>& captures) {
    std::string out = "i,x,y,heading_x,heading_y,speed,t,blur_k,crop_col,crop_row\n";
    for (const auto& c : captures) {
        out += std::to_string(c.index) + "," + f6(c.pose.x) + "," + f6(c.pose.y) +
               "," + f6(c.heading.x) + "," + f6(c.heading.y) + "," +
               f9(c.speed_at_capture) + "," + f6(c.t) + "," +
               std::to_string(c.blur_k) + "," + std::to_string(c.crop_col) + "," +
               std::to_string(c.crop_row) + "\n";
    }
    return out;
}

std::string ssim_histogram_csv(const std::array<int64_t, 32>& histogram) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (int i = 0; i < 32; ++i)
        out += f6(i / 32.0) + "," + f6((i + 1) / 32.0) + "," +
               std::to_string(histogram[i]) + "\n";
    return out;
}

std::string summary_json(const mission::MissionLog& log, const config::RunConfig& cfg,
                         uint64_t world_hash, size_t plan_waypoints,
                         double plan_length_m) {
    json j;
    j["mode"] = cfg.mode == mission::Mode::adaptive ? "adaptive" : "baseline";
    j["nominal_speed"] = cfg.controller.nominal_speed;
    j["max_discrepancy"] = cfg.controller.max_discrepancy;
    j["seed"] = cfg.field.seed;
    j["duration_s"] = log.duration_s;
    j["distance_m"] = log.distance_m;
    j["completed"] = log.completed;
    j["captures"] = log.captures.size();
    j["decisions"] = log.decisions.size();
    j["t_max"] = cfg.t_max;
    j["gap_warning"] = log.gap_warning;
    j["world_hash"] = to_hex(world_hash);
    j["plan_waypoints"] = plan_waypoints;
    j["plan_length_m"] = plan_length_m;
    return j.dump(2) + "\n";
}

std::string eval_report_json(const evaluation::EvalReport& report) {
    json j;
    j["iou_crop"] = report.iou_crop;
    j["iou_weed"] = report.iou_weed;
    j["duration_s"] = report.duration_s;
    j["objective"] = report.objective_value;
    j["within_budget"] = report.within_budget;
    j["mean_ssim"] = report.mean_ssim;
    j["coverage_fraction"] = report.coverage_fraction;
    j["planned_coverage"] = report.planned_coverage;
    j["ssim_histogram"] = report.ssim_histogram;
    json regions = json::object();
    for (const auto& [name, rs] : report.regions) {
        regions[name] = {{"mean_speed", rs.mean_speed},
                         {"samples", rs.samples},
                         {"mean_ssim", rs.mean_ssim}};
    }
    j["regions"] = regions;
    return j.dump(2) + "\n";
}

RunInfo read_run_dir(const fs::path& dir) {
    RunInfo info;
    info.dir = dir.string();
    const fs::path summary_path = dir / "summary.json";
    std::ifstream in(summary_path);
    if (!in) throw IoError("run directory lacks summary.json: " + dir.string());
    json j = json::parse(in, nullptr, true, true);
    info.mode = j.at("mode").get<std::string>();
    info.nominal_speed = j.at("nominal_speed").get<double>();
    info.seed = j.at("seed").get<uint64_t>();
    info.world_hash = j.at("world_hash").get<std::string>();
    info.duration_s = j.at("duration_s").get<double>();
    info.distance_m = j.at("distance_m").get<double>();
    info.completed = j.at("completed").get<bool>();

    const fs::path report_path = dir / "eval" / "eval_report.json";
    std::ifstream rin(report_path);
    if (rin) {
        json r = json::parse(rin, nullptr, true, true);
        info.report.iou_crop = r.at("iou_crop").get<double>();
        info.report.iou_weed = r.at("iou_weed").get<double>();
        info.report.duration_s = r.at("duration_s").get<double>();
        info.report.objective_value = r.at("objective").get<double>();
        info.report.within_budget = r.at("within_budget").get<bool>();
        info.report.mean_ssim = r.at("mean_ssim").get<double>();
        info.report.coverage_fraction = r.at("coverage_fraction").get<double>();
        info.report.planned_coverage = r.at("planned_coverage").get<double>();
        const auto& hist = r.at("ssim_histogram");
        for (size_t i = 0; i < 32 && i < hist.size(); ++i)
            info.report.ssim_histogram[i] = hist[i].get<int64_t>();
        for (const auto& [name, rs] : r.at("regions").items()) {
            evaluation::RegionStats stats;
            stats.mean_speed = rs.at("mean_speed").get<double>();
            stats.samples = rs.at("samples").get<int64_t>();
            stats.mean_ssim = rs.at("mean_ssim").get<double>();
            info.report.regions[name] = stats;
        }
        info.has_report = true;
    }
    return info;
}

std::string comparison_csv(const std::vector<RunInfo>& runs) {
    std::string out =
        "run,mode,nominal_speed,seed,iou_crop,iou_weed,iou_sum,duration_s,"
        "objective,mean_ssim,coverage\n";
    for (const RunInfo& r : runs) {
        if (!r.has_report)
            throw ValidationError("run has no eval report (run `fieldscan eval` first): " + r.dir);
        out += fs::path(r.dir).filename().string() + "," + r.mode + "," +
               f6(r.nominal_speed) + "," + std::to_string(r.seed) + "," +
               f9(r.report.iou_crop) + "," + f9(r.report.iou_weed) + "," +
               f9(r.report.iou_crop + r.report.iou_weed) + "," +
               f6(r.duration_s) + "," + f9(r.report.objective_value) + "," +
               f9(r.report.mean_ssim) + "," + f9(r.report.coverage_fraction) + "\n";
    }
    return out;
}

ImageU8 ssim_colormap(const ImageF32& map) {
    ImageU8 out(map.width, map.height, 3);
    const size_t n = map.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const float v = std::clamp(map.data[i], 0.0f, 1.0f);
        // red -> white -> blue
        uint8_t r, g, b;
        if (v < 0.5f) {
            const float t = v * 2.0f;
            r = 220;
            g = static_cast<uint8_t>(40 + 200 * t);
            b = static_cast<uint8_t>(40 + 200 * t);
        } else {
            const float t = (v - 0.5f) * 2.0f;
            r = static_cast<uint8_t>(240 - 210 * t);
            g = static_cast<uint8_t>(240 - 170 * t);
            b = static_cast<uint8_t>(240 + 15 * t > 255 ? 255 : 240 + 15 * t);
        }
        out.data[3 * i + 0] = r;
        out.data[3 * i + 1] = g;
        out.data[3 * i + 2] = b;
    }
    return out;
}

void write_class_map_png(const fs::path& path, const ImageU8& class_map) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    io::write_png_paletted(tmp.string(), class_map,
                           {{0, 0, 0}, {0, 200, 0}, {230, 220, 0}});
    fs::rename(tmp, path);
}

namespace {

// 4x6 digit/symbol glyphs for axis labels.
constexpr uint8_t kGlyphs[][6] = {
    {0b1110, 0b1010, 0b1010, 0b1010, 0b1010, 0b1110},  // 0
    {0b0100, 0b1100, 0b0100, 0b0100, 0b0100, 0b1110},  // 1
    {0b1110, 0b0010, 0b1110, 0b1000, 0b1000, 0b1110},  // 2
    {0b1110, 0b0010, 0b0110, 0b0010, 0b0010, 0b1110},  // 3
    {0b1010, 0b1010, 0b1110, 0b0010, 0b0010, 0b0010},  // 4
    {0b1110, 0b1000, 0b1110, 0b0010, 0b0010, 0b1110},  // 5
    {0b1110, 0b1000, 0b1110, 0b1010, 0b1010, 0b1110},  // 6
    {0b1110, 0b0010, 0b0010, 0b0100, 0b0100, 0b0100},  // 7
    {0b1110, 0b1010, 0b1110, 0b1010, 0b1010, 0b1110},  // 8
    {0b1110, 0b1010, 0b1110, 0b0010, 0b0010, 0b1110},  // 9
    {0b0000, 0b0000, 0b0000, 0b0000, 0b0000, 0b0100},  // .
    {0b0000, 0b0000, 0b1110, 0b0000, 0b0000, 0b0000},  // -
};

int glyph_index(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c == '.') return 10;
    if (c == '-') return 11;
    return -1;
}

void draw_text(ImageU8& img, int x, int y, const std::string& text,
               std::array<uint8_t, 3> color) {
    for (char c : text) {
        const int gi = glyph_index(c);
        if (gi >= 0) {
            for (int row = 0; row < 6; ++row)
                for (int col = 0; col < 4; ++col)
                    if (kGlyphs[gi][row] & (0b1000 >> col)) {
                        const int px = x + col, py = y + row;
                        if (px >= 0 && px < img.width && py >= 0 && py < img.height)
                            for (int ch = 0; ch < 3; ++ch)
                                img.at(px, py, ch) = color[ch];
                    }
        }
        x += 5;
    }
}

void draw_line(ImageU8& img, int x0, int y0, int x1, int y1,
               std::array<uint8_t, 3> color) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (x0 >= 0 && x0 < img.width && y0 >= 0 && y0 < img.height)
            for (int ch = 0; ch < 3; ++ch) img.at(x0, y0, ch) = color[ch];
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

ImageU8 render_plot(const std::vector<Series>& series, const std::string& title,
                    int width, int height) {
    (void)title;  // no letter glyphs; the filename carries the meaning
    ImageU8 img(width, height, 3, 255);
    const int ml = 70, mr = 20, mt = 20, mb = 40;
    const int px0 = ml, px1 = width - mr, py0 = mt, py1 = height - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const Series& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double b = i < s.band.size() ? s.band[i] : 0.0;
            if (first) {
                xmin = xmax = s.x[i];
                ymin = s.y[i] - b;
                ymax = s.y[i] + b;
                first = false;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i] - b);
                ymax = std::max(ymax, s.y[i] + b);
            }
        }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto to_px = [&](double x) {
        return px0 + static_cast<int>((x - xmin) / (xmax - xmin) * (px1 - px0));
    };
    auto to_py = [&](double y) {
        return py1 - static_cast<int>((y - ymin) / (ymax - ymin) * (py1 - py0));
    };

    const std::array<uint8_t, 3> axis{40, 40, 40};
    draw_line(img, px0, py1, px1, py1, axis);
    draw_line(img, px0, py0, px0, py1, axis);
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 5.0;
        const double yv = ymin + (ymax - ymin) * t / 5.0;
        const int tx = to_px(xv), ty = to_py(yv);
        draw_line(img, tx, py1, tx, py1 + 4, axis);
        draw_text(img, tx - 10, py1 + 8, tick_label(xv), axis);
        draw_line(img, px0 - 4, ty, px0, ty, axis);
        draw_text(img, 8, ty - 3, tick_label(yv), axis);
    }

    for (const Series& s : series) {
        if (!s.band.empty()) {
            const std::array<uint8_t, 3> tint{
                static_cast<uint8_t>(255 - (255 - s.color[0]) / 4),
                static_cast<uint8_t>(255 - (255 - s.color[1]) / 4),
                static_cast<uint8_t>(255 - (255 - s.color[2]) / 4)};
            for (size_t i = 1; i < s.x.size(); ++i) {
                const int xa = to_px(s.x[i - 1]), xb = to_px(s.x[i]);
                for (int x = xa; x <= xb; ++x) {
                    const double t = xb > xa ? double(x - xa) / (xb - xa) : 0.0;
                    const double y = s.y[i - 1] + t * (s.y[i] - s.y[i - 1]);
                    const double b = s.band[i - 1] + t * (s.band[i] - s.band[i - 1]);
                    const int yl = to_py(y + b), yh = to_py(y - b);
                    for (int yy = std::max(yl, py0); yy <= std::min(yh, py1); ++yy)
                        for (int ch = 0; ch < 3; ++ch) img.at(x, yy, ch) = tint[ch];
                }
            }
        }
    }
    for (const Series& s : series) {
        for (size_t i = 1; i < s.x.size(); ++i)
            draw_line(img, to_px(s.x[i - 1]), to_py(s.y[i - 1]), to_px(s.x[i]),
                      to_py(s.y[i]), s.color);
        for (size_t i = 0; i < s.x.size(); ++i) {
            const int cx = to_px(s.x[i]), cy = to_py(s.y[i]);
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx)
                    if (cx + dx >= 0 && cx + dx < img.width && cy + dy >= 0 &&
                        cy + dy < img.height && std::abs(dx) + std::abs(dy) <= 2)
                        for (int ch = 0; ch < 3; ++ch)
                            img.at(cx + dx, cy + dy, ch) = s.color[ch];
        }
    }
    return img;
}

}  // namespace fieldscan::artifacts
