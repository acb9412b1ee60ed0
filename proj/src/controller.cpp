#include "fieldscan/controller.hpp"

#include <algorithm>
#include <cmath>

namespace fieldscan::controller {

void PiecewiseLinear::validate() const {
    if (knots.size() < 2)
        throw ValidationError("piecewise-linear map needs at least 2 knots");
    double last_x = -std::numeric_limits<double>::infinity();
    for (const auto& [x, v] : knots) {
        if (x <= last_x)
            throw ValidationError("piecewise-linear knots must be strictly increasing");
        if (v < -1.0 || v > 1.0)
            throw ValidationError("piecewise-linear values must be in [-1, 1]");
        last_x = x;
    }
}

double PiecewiseLinear::eval(double x) const {
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    for (size_t i = 1; i < knots.size(); ++i) {
        if (x <= knots[i].first) {
            const auto& [x0, v0] = knots[i - 1];
            const auto& [x1, v1] = knots[i];
            const double t = (x - x0) / (x1 - x0);
            return v0 + t * (v1 - v0);
        }
    }
    return knots.back().second;  // unreachable
}

ControllerConfig ControllerConfig::defaults() {
    ControllerConfig cfg;
    cfg.g1.knots = {{0.0, 1.0}, {0.15, 0.0}, {0.40, -1.0}, {1.0, -1.0}};
    cfg.g2.knots = {{0.0, -1.0}, {1.0 / 3.0, -1.0}, {0.75, 0.0}, {1.0, 1.0}};
    return cfg;
}

void ControllerConfig::validate() const {
    if (!(max_discrepancy > 0.0))
        throw ValidationError("max discrepancy q must be > 0");
    if (!(nominal_speed - max_discrepancy > 0.0))
        throw ValidationError("nominal speed minus q must stay positive");
    g1.validate();
    g2.validate();
    if (!(w1_root_lo < w1_peak && w1_peak < w1_root_hi))
        throw ValidationError("weight parabola needs r1 < peak < r2");
}

double coverage_ratio(const perception::SegmentationResult& result) {
    const int64_t veg = result.n_crop + result.n_weed;
    const int64_t total = veg + result.n_background;
    if (total <= 0) throw ValidationError("segmentation result has no pixels");
    return static_cast<double>(veg) / static_cast<double>(total);
}

double confidence_level(const perception::SegmentationResult& result) {
    const int64_t veg = result.n_crop + result.n_weed;
    if (veg == 0) return 1.0;
    double sum = 0.0;
    const size_t n = result.class_map.pixel_count();
    for (size_t i = 0; i < n; ++i)
        if (result.class_map.data[i] != perception::kClassBackground)
            sum += result.prob_map.data[i];
    return sum / static_cast<double>(veg);
}

namespace {

void check_unit_range(double v, const char* name) {
    if (v < 0.0 || v > 1.0)
        throw RangeError(std::string(name) + " must be in [0, 1]");
}

}  // namespace

double eval_g1(const ControllerConfig& cfg, double cr) {
    check_unit_range(cr, "coverage ratio");
    return cfg.g1.eval(cr);
}

double eval_g2(const ControllerConfig& cfg, double cl) {
    check_unit_range(cl, "confidence level");
    return cfg.g2.eval(cl);
}

Weights weights(const ControllerConfig& cfg, double cl) {
    check_unit_range(cl, "confidence level");
    const double num = (cl - cfg.w1_root_lo) * (cfg.w1_root_hi - cl);
    const double den = (cfg.w1_peak - cfg.w1_root_lo) * (cfg.w1_root_hi - cfg.w1_peak);
    const double w1 = std::clamp(num / den, 0.0, 1.0);
    return {w1, 1.0 - w1};
}

GainBreakdown gain(const ControllerConfig& cfg, double cr, double cl) {
    GainBreakdown gb;
    gb.g1 = eval_g1(cfg, cr);
    gb.g2 = eval_g2(cfg, cl);
    const Weights w = weights(cfg, cl);
    gb.w1 = w.w1;
    gb.w2 = w.w2;
    gb.gain = gb.w1 * gb.g1 + gb.w2 * gb.g2;
    return gb;
}

ControllerDecision update_speed(ControllerState& state, const GainBreakdown& gb,
                                double cr, double cl, const ControllerConfig& cfg) {
    ControllerDecision d;
    d.index = state.step + 1;
    d.speed_prev = state.speed;
    d.cr = cr;
    d.cl = cl;
    d.g1 = gb.g1;
    d.g2 = gb.g2;
    d.w1 = gb.w1;
    d.w2 = gb.w2;
    d.gain = gb.gain;
    d.unclipped = state.speed + gb.gain * cfg.max_discrepancy;
    d.speed = std::clamp(d.unclipped, cfg.min_speed(), cfg.max_speed());
    state.speed = d.speed;
    state.step += 1;
    return d;
}

}  // namespace fieldscan::controller
