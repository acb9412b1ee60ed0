#include "fieldscan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "fieldscan/kernels.hpp"

namespace fieldscan::evaluation {

double Mosaic::coverage_fraction() const {
    if (observed.empty()) return 0.0;
    size_t n = 0;
    for (uint8_t v : observed) n += v != 0;
    return static_cast<double>(n) / static_cast<double>(observed.size());
}

Mosaic reconstruct_mosaic(const worldgen::FieldWorld& world,
                          const sensor::CameraModel& camera,
                          const std::vector<sensor::CaptureMeta>& captures) {
    if (captures.empty())
        throw ValidationError("cannot reconstruct a mosaic from zero captures");
    world.validate();

    Mosaic m;
    m.image = ImageU8(world.frame.raster_width, world.frame.raster_height, 3);
    m.observed.assign(m.image.pixel_count(), 0);
    m.source_index.assign(m.image.pixel_count(), -1);

    const int iw = camera.image_width, ih = camera.image_height;
    for (const sensor::CaptureMeta& meta : captures) {
        const sensor::Capture cap = sensor::replay(world, camera, meta);
        const size_t row_bytes = static_cast<size_t>(iw) * 3;
        for (int y = 0; y < ih; ++y) {
            const int ry = cap.crop_row + y;
            std::memcpy(m.image.data.data() + m.image.idx(cap.crop_col, ry),
                        cap.image.data.data() + cap.image.idx(0, y), row_bytes);
            uint8_t* obs = m.observed.data() +
                           static_cast<size_t>(ry) * m.image.width + cap.crop_col;
            int32_t* src = m.source_index.data() +
                           static_cast<size_t>(ry) * m.image.width + cap.crop_col;
            std::fill(obs, obs + iw, uint8_t{1});
            std::fill(src, src + iw, meta.index);
        }
    }
    return m;
}

std::vector<uint8_t> planned_region_mask(const planner::CoveragePlan& plan,
                                         const sensor::CameraModel& camera,
                                         const geometry::FieldFrame& frame) {
    std::vector<uint8_t> mask(static_cast<size_t>(frame.raster_width) *
                                  frame.raster_height,
                              0);
    const double hw = camera.footprint_width_m * 0.5;
    const double hh = camera.footprint_height_m * 0.5;
    auto fill_rect = [&](Vec2 lo, Vec2 hi) {
        // Pixels whose centers lie inside the swept rectangle.
        int c0 = static_cast<int>(std::ceil((lo.x - frame.origin_world.x) / frame.gsd - 0.5));
        int c1 = static_cast<int>(std::floor((hi.x - frame.origin_world.x) / frame.gsd - 0.5));
        int r0 = static_cast<int>(std::ceil((frame.origin_world.y - hi.y) / frame.gsd - 0.5));
        int r1 = static_cast<int>(std::floor((frame.origin_world.y - lo.y) / frame.gsd - 0.5));
        c0 = std::max(c0, 0);
        r0 = std::max(r0, 0);
        c1 = std::min(c1, frame.raster_width - 1);
        r1 = std::min(r1, frame.raster_height - 1);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                mask[static_cast<size_t>(r) * frame.raster_width + c] = 1;
    };
    const auto& pts = plan.path.points;
    for (size_t i = 1; i < pts.size(); ++i) {
        const Vec2 a = pts[i - 1], b = pts[i];
        fill_rect({std::min(a.x, b.x) - hw, std::min(a.y, b.y) - hh},
                  {std::max(a.x, b.x) + hw, std::max(a.y, b.y) + hh});
    }
    return mask;
}

double iou(const ImageU8& pred, const ImageU8& truth, uint8_t cls) {
    if (pred.width != truth.width || pred.height != truth.height ||
        pred.channels != 1 || truth.channels != 1)
        throw ValidationError("IoU inputs must be single-channel maps of equal dims");
    int64_t inter = 0, uni = 0;
    const size_t n = pred.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const bool p = pred.data[i] == cls;
        const bool t = truth.data[i] == cls;
        inter += p && t;
        uni += p || t;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double SsimStats::mean_over(const std::vector<uint8_t>& mask) const {
    if (mask.size() != map.data.size())
        throw ValidationError("SSIM mask size mismatch");
    double sum = 0.0;
    int64_t n = 0;
    for (size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            sum += map.data[i];
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

namespace {

std::array<float, 11> gaussian11_taps() {
    std::array<double, 11> t{};
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double x = i - 5;
        t[i] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
        sum += t[i];
    }
    std::array<float, 11> out{};
    for (int i = 0; i < 11; ++i) out[i] = static_cast<float>(t[i] / sum);
    return out;
}

ImageF32 to_luma(const ImageU8& img) {
    ImageF32 out(img.width, img.height, 1);
    if (img.channels == 3) {
        kernels::luma601_f32(img.data.data(), out.data.data(), img.pixel_count());
    } else {
        for (size_t i = 0; i < img.data.size(); ++i)
            out.data[i] = static_cast<float>(img.data[i]);
    }
    return out;
}

}  // namespace

SsimStats ssim_map(const ImageU8& a, const ImageU8& b) {
    if (!(a.width == b.width && a.height == b.height))
        throw ValidationError("SSIM inputs must share dimensions");
    const int w = a.width, h = a.height;
    const size_t n = static_cast<size_t>(w) * h;
    const std::array<float, 11> taps = gaussian11_taps();
    constexpr float c1 = 6.5025f;    // (0.01 * 255)^2
    constexpr float c2 = 58.5225f;   // (0.03 * 255)^2

    const ImageF32 la = to_luma(a);
    const ImageF32 lb = to_luma(b);

    std::vector<float> tmp(n), prod(n);
    std::vector<float> mu_a(n), mu_b(n), mu_aa(n), mu_bb(n), mu_ab(n);

    kernels::sep_filter11_f32(la.data.data(), tmp.data(), mu_a.data(), w, h, taps.data());
    kernels::sep_filter11_f32(lb.data.data(), tmp.data(), mu_b.data(), w, h, taps.data());
    for (size_t i = 0; i < n; ++i) prod[i] = la.data[i] * la.data[i];
    kernels::sep_filter11_f32(prod.data(), tmp.data(), mu_aa.data(), w, h, taps.data());
    for (size_t i = 0; i < n; ++i) prod[i] = lb.data[i] * lb.data[i];
    kernels::sep_filter11_f32(prod.data(), tmp.data(), mu_bb.data(), w, h, taps.data());
    for (size_t i = 0; i < n; ++i) prod[i] = la.data[i] * lb.data[i];
    kernels::sep_filter11_f32(prod.data(), tmp.data(), mu_ab.data(), w, h, taps.data());

    SsimStats stats;
    stats.map = ImageF32(w, h, 1);
    kernels::ssim_combine_f32(mu_a.data(), mu_b.data(), mu_aa.data(), mu_bb.data(),
                              mu_ab.data(), stats.map.data.data(), n, c1, c2);

    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const float v = stats.map.data[i];
        sum += v;
        const int bin = std::clamp(static_cast<int>(v * 32.0f), 0, 31);
        ++stats.histogram[bin];
    }
    stats.mean = sum / static_cast<double>(n);
    return stats;
}

double objective(double iou_crop, double iou_weed, double duration_s, double alpha) {
    if (!(duration_s > 0.0)) throw ValidationError("objective needs C > 0");
    if (!(alpha > 0.0)) throw ValidationError("objective needs alpha > 0");
    return (iou_crop + iou_weed) / (alpha * duration_s);
}

ImageU8 segment_tiled(const ImageU8& image, const sensor::CameraModel& camera,
                      const perception::Segmenter& segmenter) {
    const int tw = camera.image_width, th = camera.image_height;
    ImageU8 full(image.width, image.height, 1);
    for (int ty = 0; ty < image.height; ty += th) {
        for (int tx = 0; tx < image.width; tx += tw) {
            const int cw = std::min(tw, image.width - tx);
            const int ch = std::min(th, image.height - ty);
            // Zero-pad partial tiles to the camera size, crop results back.
            ImageU8 tile(tw, th, 3);
            for (int y = 0; y < ch; ++y)
                std::memcpy(tile.data.data() + tile.idx(0, y),
                            image.data.data() + image.idx(tx, ty + y),
                            static_cast<size_t>(cw) * 3);
            const perception::SegmentationResult seg = segmenter.segment(tile);
            perception::validate_segmentation(seg, tw, th);
            for (int y = 0; y < ch; ++y)
                std::memcpy(full.data.data() + full.idx(tx, ty + y),
                            seg.class_map.data.data() + seg.class_map.idx(0, y),
                            static_cast<size_t>(cw));
        }
    }
    return full;
}

EvalReport evaluate_run(const worldgen::FieldWorld& world,
                        const planner::CoveragePlan& plan,
                        const mission::MissionLog& log,
                        const mission::MissionConfig& config,
                        const perception::Segmenter& segmenter, double alpha,
                        const std::vector<worldgen::Region>& regions,
                        Mosaic* mosaic_out, SsimStats* ssim_out,
                        ImageU8* class_map_out) {
    EvalReport report;
    report.duration_s = log.duration_s;
    report.within_budget = log.duration_s <= config.t_max;

    Mosaic mosaic = reconstruct_mosaic(world, config.camera, log.captures);
    report.coverage_fraction = mosaic.coverage_fraction();

    const std::vector<uint8_t> planned =
        planned_region_mask(plan, config.camera, world.frame);
    int64_t planned_total = 0, planned_hit = 0;
    for (size_t i = 0; i < planned.size(); ++i) {
        if (planned[i]) {
            ++planned_total;
            planned_hit += mosaic.observed[i] != 0;
        }
    }
    report.planned_coverage =
        planned_total > 0
            ? static_cast<double>(planned_hit) / static_cast<double>(planned_total)
            : 0.0;

    const ImageU8 class_map = segment_tiled(mosaic.image, config.camera, segmenter);
    report.iou_crop = iou(class_map, world.labels, worldgen::kLabelCrop);
    report.iou_weed = iou(class_map, world.labels, worldgen::kLabelWeed);
    report.objective_value =
        objective(report.iou_crop, report.iou_weed, report.duration_s, alpha);

    SsimStats ssim = ssim_map(mosaic.image, world.orthophoto);
    report.mean_ssim = ssim.mean;
    report.ssim_histogram = ssim.histogram;

    // Region-conditioned stats: mean speed from the decision rows (baseline
    // runs fall back to the capture manifest) and mean SSIM over the rect.
    const auto& frame = world.frame;
    for (const worldgen::Region& r : regions) {
        RegionStats rs;
        double speed_sum = 0.0;
        auto in_rect = [&](Vec2 p) {
            return p.x >= r.lo.x && p.x < r.hi.x && p.y >= r.lo.y && p.y < r.hi.y;
        };
        if (!log.decisions.empty()) {
            for (const auto& dec : log.decisions)
                if (in_rect(dec.pose)) {
                    speed_sum += dec.speed;
                    ++rs.samples;
                }
        } else {
            for (const auto& cap : log.captures)
                if (in_rect(cap.pose)) {
                    speed_sum += cap.speed_at_capture;
                    ++rs.samples;
                }
        }
        rs.mean_speed = rs.samples > 0 ? speed_sum / rs.samples : 0.0;

        std::vector<uint8_t> mask(ssim.map.data.size(), 0);
        const int c0 = std::max(0, static_cast<int>((r.lo.x - frame.origin_world.x) / frame.gsd));
        const int c1 = std::min(frame.raster_width,
                                static_cast<int>((r.hi.x - frame.origin_world.x) / frame.gsd));
        const int r0 = std::max(0, static_cast<int>((frame.origin_world.y - r.hi.y) / frame.gsd));
        const int r1 = std::min(frame.raster_height,
                                static_cast<int>((frame.origin_world.y - r.lo.y) / frame.gsd));
        for (int row = r0; row < r1; ++row)
            for (int col = c0; col < c1; ++col)
                mask[static_cast<size_t>(row) * frame.raster_width + col] = 1;
        rs.mean_ssim = ssim.mean_over(mask);
        report.regions[r.name] = rs;
    }

    if (mosaic_out) *mosaic_out = std::move(mosaic);
    if (ssim_out) *ssim_out = std::move(ssim);
    if (class_map_out) *class_map_out = class_map;
    return report;
}

}  // namespace fieldscan::evaluation
