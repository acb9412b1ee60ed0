#include "fieldscan/sensor.hpp"

#include <cmath>
#include <cstring>

#include "fieldscan/kernels.hpp"

namespace fieldscan::sensor {

CameraModel CameraModel::create(int width, int height, double altitude,
                                double dt, double gsd) {
    CameraModel cam;
    cam.image_width = width;
    cam.image_height = height;
    cam.altitude_m = altitude;
    cam.dt = dt;
    cam.footprint_width_m = width * gsd;
    cam.footprint_height_m = height * gsd;
    cam.validate();
    return cam;
}

void CameraModel::validate() const {
    if (image_width <= 0 || image_height <= 0)
        throw ValidationError("camera image dims must be > 0");
    if (!(dt > 0.0)) throw ValidationError("camera dt must be > 0");
    if (!(altitude_m > 0.0)) throw ValidationError("camera altitude must be > 0");
    if (!(footprint_width_m > 0.0) || !(footprint_height_m > 0.0))
        throw ValidationError("camera footprint must be derived from a gsd");
}

void BlurLaw::validate() const {
    if (!table.empty()) {
        double last = -1.0;
        for (const auto& [s, k] : table) {
            if (s < 0.0 || s <= last)
                throw ValidationError("blur table speeds must be >= 0 and strictly increasing");
            if (k < 1 || k % 2 == 0)
                throw ValidationError("blur table kernel lengths must be positive odd integers");
            last = s;
        }
    }
}

int BlurLaw::kernel_length(double speed) const {
    if (speed < 0.0) throw RangeError("speed must be >= 0");
    if (!table.empty()) {
        int k = 1;
        for (const auto& [s, kk] : table) {
            if (speed >= s) k = kk;
            else break;
        }
        return k;
    }
    const double over = std::max(0.0, speed - base_speed);
    const int k = 2 * static_cast<int>(std::floor(over)) + 1;
    return std::max(1, k);
}

int blur_kernel_length(double speed, const BlurLaw& law) {
    return law.kernel_length(speed);
}

ImageU8 capture(const worldgen::FieldWorld& world, const CameraModel& cam,
                Vec2 pose, int* crop_col, int* crop_row) {
    cam.validate();
    const auto& frame = world.frame;
    const double g = frame.gsd;
    const long col0 = std::lround((pose.x - cam.footprint_width_m * 0.5 -
                                   frame.origin_world.x) / g);
    const long row0 = std::lround((frame.origin_world.y -
                                   (pose.y + cam.footprint_height_m * 0.5)) / g);
    if (col0 < 0 || col0 + cam.image_width > frame.raster_width)
        throw RangeError("capture footprint exceeds field extent in x");
    if (row0 < 0 || row0 + cam.image_height > frame.raster_height)
        throw RangeError("capture footprint exceeds field extent in y");

    ImageU8 out(cam.image_width, cam.image_height, 3);
    const size_t row_bytes = static_cast<size_t>(cam.image_width) * 3;
    for (int y = 0; y < cam.image_height; ++y) {
        const uint8_t* src = world.orthophoto.data.data() +
                             world.orthophoto.idx(static_cast<int>(col0),
                                                  static_cast<int>(row0) + y);
        std::memcpy(out.data.data() + out.idx(0, y), src, row_bytes);
    }
    if (crop_col) *crop_col = static_cast<int>(col0);
    if (crop_row) *crop_row = static_cast<int>(row0);
    return out;
}

ImageU8 apply_motion_blur(const ImageU8& image, int k, Vec2 heading) {
    if (k < 1 || k % 2 == 0)
        throw ValidationError("blur kernel length must be a positive odd integer");
    if (k == 1) return image;
    const bool horizontal = std::abs(heading.x) >= std::abs(heading.y);
    ImageU8 out(image.width, image.height, image.channels);
    kernels::box_blur_axis_u8(image.data.data(), out.data.data(), image.width,
                              image.height, image.channels, k, horizontal);
    return out;
}

Capture acquire(const worldgen::FieldWorld& world, const CameraModel& cam,
                Vec2 pose, Vec2 heading, double speed, double t, int index,
                const BlurLaw& law) {
    Capture cap;
    ImageU8 raw = capture(world, cam, pose, &cap.crop_col, &cap.crop_row);
    cap.blur_k = law.kernel_length(speed);
    cap.image = apply_motion_blur(raw, cap.blur_k, heading);
    cap.pose = pose;
    cap.heading = heading;
    cap.speed_at_capture = speed;
    cap.t = t;
    cap.index = index;
    return cap;
}

Capture replay(const worldgen::FieldWorld& world, const CameraModel& cam,
               const CaptureMeta& meta) {
    Capture cap;
    int col = 0, row = 0;
    ImageU8 raw = capture(world, cam, meta.pose, &col, &row);
    if (col != meta.crop_col || row != meta.crop_row)
        throw ValidationError("capture manifest does not match the world frame");
    cap.image = apply_motion_blur(raw, meta.blur_k, meta.heading);
    cap.pose = meta.pose;
    cap.heading = meta.heading;
    cap.speed_at_capture = meta.speed_at_capture;
    cap.t = meta.t;
    cap.index = meta.index;
    cap.blur_k = meta.blur_k;
    cap.crop_col = col;
    cap.crop_row = row;
    return cap;
}

}  // namespace fieldscan::sensor
