#include "fieldscan/worldgen.hpp"

#include <algorithm>
#include <cmath>

#include "fieldscan/png_io.hpp"
#include "fieldscan/rng.hpp"

namespace fieldscan::worldgen {

void FieldSpec::validate() const {
    if (!(width_m > 0.0) || !(height_m > 0.0)) throw ValidationError("field dims must be > 0");
    if (!(gsd > 0.0)) throw ValidationError("gsd must be > 0");
    if (!(row_spacing_m > 0.0) || !(plant_spacing_m > 0.0))
        throw ValidationError("row/plant spacing must be > 0");
    if (!(plant_radius_m > 0.0)) throw ValidationError("plant radius must be > 0");
    if (plant_jitter < 0.0 || plant_jitter > 1.0)
        throw ValidationError("plant jitter must be in [0, 1]");
    if (weed_density < 0.0) throw ValidationError("weed density must be >= 0");
    if (!(weed_radius_m > 0.0)) throw ValidationError("weed radius must be > 0");
    if (noise_sigma < 0.0) throw ValidationError("noise sigma must be >= 0");
    for (const Region& r : regions) {
        if (r.name.empty()) throw ValidationError("region name must not be empty");
        if (!(r.lo.x < r.hi.x) || !(r.lo.y < r.hi.y))
            throw ValidationError("region rect is degenerate: " + r.name);
        if (r.lo.x < 0.0 || r.lo.y < 0.0 || r.hi.x > width_m || r.hi.y > height_m)
            throw ValidationError("region lies outside the field: " + r.name);
        if (r.weed_density && *r.weed_density < 0.0)
            throw ValidationError("region weed density must be >= 0: " + r.name);
    }
    if (!crop_region.empty() && !find_region(crop_region))
        throw ValidationError("crop_region names an undeclared region: " + crop_region);
}

const Region* FieldSpec::find_region(const std::string& name) const {
    for (const Region& r : regions)
        if (r.name == name) return &r;
    return nullptr;
}

void FieldWorld::validate() const {
    frame.validate();
    if (orthophoto.channels != 3) throw ValidationError("orthophoto must be RGB");
    if (labels.channels != 1) throw ValidationError("labels must be single-channel");
    if (orthophoto.width != labels.width || orthophoto.height != labels.height)
        throw ValidationError(
            "orthophoto/labels dimension mismatch: " + std::to_string(orthophoto.width) +
            "x" + std::to_string(orthophoto.height) + " vs " +
            std::to_string(labels.width) + "x" + std::to_string(labels.height));
    if (orthophoto.width != frame.raster_width || orthophoto.height != frame.raster_height)
        throw ValidationError("raster dims do not match the field frame");
    for (uint8_t v : labels.data)
        if (v > 2) throw ValidationError("labels contain a value outside {0,1,2}");
}

uint64_t FieldWorld::content_hash() const {
    uint64_t h = fnv1a64(&frame.gsd, sizeof(frame.gsd));
    const int32_t dims[2] = {frame.raster_width, frame.raster_height};
    h = fnv1a64(dims, sizeof(dims), h);
    h = fnv1a64(orthophoto.data.data(), orthophoto.data.size(), h);
    h = fnv1a64(labels.data.data(), labels.data.size(), h);
    return h;
}

namespace {

// Paints a filled disc into the label raster. World frame origin is the
// top-left corner at (0, height_m); rows advance along -y.
void paint_disc(ImageU8& labels, const geometry::FieldFrame& frame, Vec2 center,
                double radius, uint8_t label) {
    const double g = frame.gsd;
    const int w = labels.width, h = labels.height;
    const int c0 = std::max(0, static_cast<int>(std::floor((center.x - radius) / g)));
    const int c1 = std::min(w - 1, static_cast<int>(std::floor((center.x + radius) / g)));
    const int r0 = std::max(0, static_cast<int>(std::floor((frame.origin_world.y - center.y - radius) / g)));
    const int r1 = std::min(h - 1, static_cast<int>(std::floor((frame.origin_world.y - center.y + radius) / g)));
    const double rr = radius * radius;
    for (int r = r0; r <= r1; ++r) {
        const double py = frame.origin_world.y - (r + 0.5) * g;
        const double dy = py - center.y;
        for (int c = c0; c <= c1; ++c) {
            const double px = (c + 0.5) * g;
            const double dx = px - center.x;
            if (dx * dx + dy * dy <= rr) labels.at(c, r) = label;
        }
    }
}

// Approximately Gaussian channel noise from a stateless hash so pixel values
// never depend on draw order. Irwin-Hall over 4 bytes, std ~147.2.
inline double hash_noise(uint64_t h, int byte_offset) {
    int s = 0;
    for (int i = 0; i < 4; ++i) s += static_cast<int>((h >> (8 * (byte_offset + i))) & 0xff);
    return (s - 510) * (1.0 / 147.22);
}

}  // namespace

FieldWorld generate_field(const FieldSpec& spec) {
    spec.validate();

    FieldWorld world;
    world.frame.gsd = spec.gsd;
    world.frame.raster_width = static_cast<int>(std::lround(spec.width_m / spec.gsd));
    world.frame.raster_height = static_cast<int>(std::lround(spec.height_m / spec.gsd));
    world.frame.origin_world = {0.0, world.frame.raster_height * spec.gsd};
    world.frame.validate();

    world.labels = ImageU8(world.frame.raster_width, world.frame.raster_height, 1,
                           kLabelBackground);

    Rng rng(spec.seed);

    // Crop rows, top-to-bottom, plants left-to-right.
    Vec2 crop_lo{0.0, 0.0};
    Vec2 crop_hi{spec.width_m, spec.height_m};
    if (!spec.crop_region.empty()) {
        const Region* r = spec.find_region(spec.crop_region);
        crop_lo = r->lo;
        crop_hi = r->hi;
    }
    const double jx = spec.plant_jitter * spec.plant_spacing_m;
    const double jy = spec.plant_jitter * spec.row_spacing_m;
    for (double y = crop_hi.y - spec.row_spacing_m * 0.5; y >= crop_lo.y;
         y -= spec.row_spacing_m) {
        for (double x = crop_lo.x + spec.plant_spacing_m * 0.5; x <= crop_hi.x;
             x += spec.plant_spacing_m) {
            const double dx = rng.uniform(-jx, jx);
            const double dy = rng.uniform(-jy, jy);
            paint_disc(world.labels, world.frame, {x + dx, y + dy},
                       spec.plant_radius_m, kLabelCrop);
        }
    }

    // Weed blobs: whole-field density first, then named regions in
    // declaration order. Weeds overwrite crops.
    auto paint_weed_blobs = [&](Vec2 lo, Vec2 hi, double density) {
        const double area = (hi.x - lo.x) * (hi.y - lo.y);
        const uint32_t count = rng.poisson(density * area);
        for (uint32_t i = 0; i < count; ++i) {
            const Vec2 center{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
            const int lobes = 2 + static_cast<int>(rng.uniform() * 3.0);
            for (int l = 0; l < lobes; ++l) {
                const Vec2 off{rng.uniform(-0.6, 0.6) * spec.weed_radius_m,
                               rng.uniform(-0.6, 0.6) * spec.weed_radius_m};
                const double radius = spec.weed_radius_m * rng.uniform(0.5, 1.0);
                paint_disc(world.labels, world.frame, center + off, radius, kLabelWeed);
            }
        }
    };
    if (spec.weed_density > 0.0)
        paint_weed_blobs({0.0, 0.0}, {spec.width_m, spec.height_m}, spec.weed_density);
    for (const Region& r : spec.regions)
        if (r.weed_density && *r.weed_density > 0.0)
            paint_weed_blobs(r.lo, r.hi, *r.weed_density);

    // Color pass: class mean plus per-pixel hash noise.
    world.orthophoto = ImageU8(world.frame.raster_width, world.frame.raster_height, 3);
    const Rgb means[3] = {spec.soil_color, spec.crop_color, spec.weed_color};
    const size_t n = world.labels.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const Rgb mean = means[world.labels.data[i]];
        const uint64_t h1 = splitmix64(spec.seed ^ (i * 2 + 0) ^ 0x9e3779b97f4a7c15ull);
        const uint64_t h2 = splitmix64(spec.seed ^ (i * 2 + 1) ^ 0x7f4a7c159e3779b9ull);
        const double nr = hash_noise(h1, 0);
        const double ng = hash_noise(h1, 4);
        const double nb = hash_noise(h2, 0);
        auto shade = [&](uint8_t m, double noise) {
            const double v = m + spec.noise_sigma * noise;
            return static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
        };
        world.orthophoto.data[3 * i + 0] = shade(mean.r, nr);
        world.orthophoto.data[3 * i + 1] = shade(mean.g, ng);
        world.orthophoto.data[3 * i + 2] = shade(mean.b, nb);
    }

    world.validate();
    return world;
}

FieldWorld load_field(const std::string& orthophoto_path,
                      const std::string& labels_path, double gsd) {
    if (!(gsd > 0.0)) throw ValidationError("gsd must be > 0");
    FieldWorld world;
    world.orthophoto = io::read_png(orthophoto_path);
    if (world.orthophoto.channels != 3)
        throw ValidationError("orthophoto must decode to RGB: " + orthophoto_path);
    world.labels = io::read_png(labels_path);
    if (world.labels.channels != 1)
        throw ValidationError("labels must decode to a single channel: " + labels_path);
    world.frame.gsd = gsd;
    world.frame.raster_width = world.orthophoto.width;
    world.frame.raster_height = world.orthophoto.height;
    world.frame.origin_world = {0.0, world.orthophoto.height * gsd};
    world.validate();
    return world;
}

}  // namespace fieldscan::worldgen
