#include "fieldscan/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fieldscan::mission {

void MissionConfig::validate() const {
    controller.validate();
    camera.validate();
    blur.validate();
    if (!(t_max > 0.0)) throw ValidationError("T_max must be > 0");
}

bool MissionConfig::along_track_gap_possible() const {
    return camera.dt * controller.max_speed() > camera.footprint_height_m;
}

void mission_extent(const worldgen::FieldWorld& world,
                    const sensor::CameraModel& camera, Vec2* lo, Vec2* hi) {
    const auto& f = world.frame;
    const double margin_x = camera.footprint_width_m * 0.5 + f.gsd;
    const double margin_y = camera.footprint_height_m * 0.5 + f.gsd;
    *lo = {f.origin_world.x + margin_x, f.origin_world.y - f.height_m() + margin_y};
    *hi = {f.origin_world.x + f.width_m() - margin_x, f.origin_world.y - margin_y};
    if (!(lo->x < hi->x && lo->y < hi->y))
        throw ValidationError("field is smaller than one camera footprint");
}

geometry::Polygon mission_polygon(const geometry::Polygon& poly,
                                  const worldgen::FieldWorld& world,
                                  const sensor::CameraModel& camera) {
    poly.validate();
    Vec2 lo, hi;
    mission_extent(world, camera, &lo, &hi);
    geometry::Polygon clipped = geometry::clip_polygon_to_rect(poly, lo, hi);
    if (clipped.vertices.size() < 3)
        throw PlanningError("survey polygon vanishes after the footprint inset");
    return clipped;
}

namespace {

void validate_plan_extent(const worldgen::FieldWorld& world,
                          const planner::CoveragePlan& plan,
                          const sensor::CameraModel& camera) {
    Vec2 lo, hi;
    mission_extent(world, camera, &lo, &hi);
    const double tol = 1e-9;
    for (const Vec2& p : plan.path.points) {
        if (p.x < lo.x - tol || p.x > hi.x + tol || p.y < lo.y - tol ||
            p.y > hi.y + tol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "plan waypoint (%.3f, %.3f) leaves the capture-safe "
                          "extent [%.3f, %.3f] x [%.3f, %.3f]",
                          p.x, p.y, lo.x, hi.x, lo.y, hi.y);
            throw ValidationError(buf);
        }
    }
}

MissionLog run_loop(const worldgen::FieldWorld& world,
                    const planner::CoveragePlan& plan, const MissionConfig& config,
                    const perception::Segmenter* segmenter) {
    config.validate();
    world.validate();
    plan.path.validate();
    validate_plan_extent(world, plan, config.camera);

    MissionLog log;
    log.gap_warning = config.along_track_gap_possible();
    if (log.gap_warning)
        std::fprintf(stderr,
                     "warning: dt * max speed (%.2f m) exceeds the footprint "
                     "height (%.2f m); along-track gaps are possible\n",
                     config.camera.dt * config.controller.max_speed(),
                     config.camera.footprint_height_m);

    const double path_length = plan.path.total_length();
    const double dt = config.camera.dt;
    controller::ControllerState state = controller::ControllerState::initial(config.controller);
    const double baseline_speed = config.controller.nominal_speed;

    double d = 0.0;
    double t = 0.0;
    int index = 1;
    while (true) {
        const auto [pose, heading] = geometry::arc_position(plan.path, d);
        const double speed_held = (segmenter != nullptr) ? state.speed : baseline_speed;
        sensor::Capture cap = sensor::acquire(world, config.camera, pose, heading,
                                              speed_held, t, index, config.blur);
        log.captures.push_back({cap.pose, cap.heading, cap.speed_at_capture,
                                cap.t, cap.index, cap.blur_k, cap.crop_col,
                                cap.crop_row});
        if (config.keep_images) log.images.push_back(cap.image);

        double speed_next = baseline_speed;
        if (segmenter != nullptr) {
            const perception::SegmentationResult seg = segmenter->segment(cap.image);
            perception::validate_segmentation(seg, cap.image.width, cap.image.height);
            const double cr = controller::coverage_ratio(seg);
            const double cl = controller::confidence_level(seg);
            const controller::GainBreakdown gb = controller::gain(config.controller, cr, cl);
            controller::ControllerDecision dec =
                controller::update_speed(state, gb, cr, cl, config.controller);
            dec.t = t;
            dec.pose = pose;
            log.decisions.push_back(dec);
            speed_next = dec.speed;
        }

        d += speed_next * dt;
        t += dt;
        ++index;
        if (d >= path_length) {
            log.completed = true;
            break;
        }
        if (t >= config.t_max) {
            log.completed = false;
            break;
        }
    }

    log.duration_s = t;
    log.distance_m = std::min(d, path_length);
    return log;
}

}  // namespace

MissionLog run_adaptive(const worldgen::FieldWorld& world,
                        const planner::CoveragePlan& plan,
                        const MissionConfig& config,
                        const perception::Segmenter& segmenter) {
    return run_loop(world, plan, config, &segmenter);
}

MissionLog run_baseline(const worldgen::FieldWorld& world,
                        const planner::CoveragePlan& plan,
                        const MissionConfig& config) {
    return run_loop(world, plan, config, nullptr);
}

}  // namespace fieldscan::mission
