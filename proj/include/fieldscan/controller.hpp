#pragma once

#include <vector>

#include "fieldscan/common.hpp"
#include "fieldscan/perception.hpp"

namespace fieldscan::controller {

// Piecewise-linear map with constant extension outside the knot range.
struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;  // (x, value)

    void validate() const;  // strictly increasing x, values in [-1, 1]
    double eval(double x) const;
};

struct ControllerConfig {
    double nominal_speed = 4.0;   // s_bar, m/s
    double max_discrepancy = 1.0; // q, m/s
    PiecewiseLinear g1;           // coverage-ratio translation
    PiecewiseLinear g2;           // confidence-level translation
    double w1_root_lo = 1.0 / 3.0;
    double w1_root_hi = 1.0;
    double w1_peak = 2.0 / 3.0;

    static ControllerConfig defaults();
    void validate() const;
    double min_speed() const { return nominal_speed - max_discrepancy; }
    double max_speed() const { return nominal_speed + max_discrepancy; }
};

struct ControllerState {
    double speed = 0.0;  // s_{i-1}
    int step = 0;

    static ControllerState initial(const ControllerConfig& cfg) {
        return {cfg.nominal_speed, 0};
    }
};

// One row of the mission log.
struct ControllerDecision {
    int index = 0;
    double t = 0.0;
    Vec2 pose;
    double speed_prev = 0.0;
    double cr = 0.0;
    double cl = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    double gain = 0.0;
    double unclipped = 0.0;
    double speed = 0.0;
};

double coverage_ratio(const perception::SegmentationResult& result);

// Mean max-class probability over crop/weed pixels; defined as 1.0 when no
// pixel is vegetated so bare ground reads as certain emptiness.
double confidence_level(const perception::SegmentationResult& result);

double eval_g1(const ControllerConfig& cfg, double cr);
double eval_g2(const ControllerConfig& cfg, double cl);

struct Weights {
    double w1 = 0.0;
    double w2 = 0.0;
};
Weights weights(const ControllerConfig& cfg, double cl);

struct GainBreakdown {
    double g1 = 0.0;
    double g2 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    double gain = 0.0;
};
GainBreakdown gain(const ControllerConfig& cfg, double cr, double cl);

// u = s_{i-1} + G*q clipped into [s_bar - q, s_bar + q]; advances the state.
ControllerDecision update_speed(ControllerState& state, const GainBreakdown& gb,
                                double cr, double cl, const ControllerConfig& cfg);

}  // namespace fieldscan::controller
