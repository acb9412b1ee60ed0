#pragma once

#include <optional>
#include <vector>

#include "fieldscan/worldgen.hpp"

namespace fieldscan::sensor {

// Nadir camera: samples the world raster 1:1, so the ground footprint is the
// image size times the field gsd.
struct CameraModel {
    int image_width = 640;
    int image_height = 480;
    double altitude_m = 10.0;
    double gimbal_pitch_deg = -90.0;
    double dt = 1.0;  // seconds between captures (1 / f_best)
    double footprint_width_m = 0.0;
    double footprint_height_m = 0.0;

    static CameraModel create(int width, int height, double altitude, double dt,
                              double gsd);
    void validate() const;
};

// Speed -> blur kernel length. The default law keeps captures undistorted at
// 2 m/s and grows the kernel by 2 px per whole m/s above that; a config can
// swap in an explicit speed:k table instead.
struct BlurLaw {
    double base_speed = 2.0;
    std::vector<std::pair<double, int>> table;  // sorted thresholds, odd k

    void validate() const;
    int kernel_length(double speed) const;
};

struct Capture {
    ImageU8 image;  // blurred pixels as acquired
    Vec2 pose;
    Vec2 heading;
    double speed_at_capture = 0.0;
    double t = 0.0;
    int index = 0;
    int blur_k = 1;
    int crop_col = 0;  // raster origin of the footprint crop
    int crop_row = 0;
};

// Metadata alone reproduces the capture bit-exactly from the world, so
// mission logs stay small and evaluation replays instead of storing frames.
struct CaptureMeta {
    Vec2 pose;
    Vec2 heading;
    double speed_at_capture = 0.0;
    double t = 0.0;
    int index = 0;
    int blur_k = 1;
    int crop_col = 0;
    int crop_row = 0;
};

// Raw (unblurred) axis-aligned crop centered on the pose. Throws RangeError
// when the footprint leaves the raster.
ImageU8 capture(const worldgen::FieldWorld& world, const CameraModel& cam,
                Vec2 pose, int* crop_col = nullptr, int* crop_row = nullptr);

int blur_kernel_length(double speed, const BlurLaw& law = {});

// 1-D box kernel of odd length k oriented along the image-frame projection of
// the (axis-aligned) heading; k == 1 returns the input unchanged.
ImageU8 apply_motion_blur(const ImageU8& image, int k, Vec2 heading);

Capture acquire(const worldgen::FieldWorld& world, const CameraModel& cam,
                Vec2 pose, Vec2 heading, double speed, double t, int index,
                const BlurLaw& law);

Capture replay(const worldgen::FieldWorld& world, const CameraModel& cam,
               const CaptureMeta& meta);

}  // namespace fieldscan::sensor
