// Offline calibration sweep for the prototype segmenter: renders a
// boundary-rich vegetated card with the default worldgen colors, applies
// increasing motion blur, and prints cr/cl (and the controller gain) per
// (sigma, temperature) candidate. The chosen pair is committed as the
// default config.

#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "fieldscan/cli.hpp"

using namespace fieldscan;

namespace {

struct CardParams {
    double radius = 0.10;
    double row_spacing = 0.35;
    double plant_spacing = 0.35;
    double weed_density = 0.6;
    double noise = 12.0;
};

worldgen::FieldSpec card_spec(uint64_t seed, const CardParams& cp) {
    worldgen::FieldSpec spec;
    spec.width_m = 12.8;
    spec.height_m = 9.6;
    spec.gsd = 0.02;
    spec.seed = seed;
    spec.row_spacing_m = cp.row_spacing;
    spec.plant_spacing_m = cp.plant_spacing;
    spec.plant_radius_m = cp.radius;
    spec.plant_jitter = 0.25;
    spec.weed_density = cp.weed_density;
    spec.weed_radius_m = cp.radius * 0.8;
    spec.noise_sigma = cp.noise;
    return spec;
}

ImageU8 center_crop(const worldgen::FieldWorld& world, int w, int h) {
    const int x0 = (world.frame.raster_width - w) / 2;
    const int y0 = (world.frame.raster_height - h) / 2;
    ImageU8 out(w, h, 3);
    for (int y = 0; y < h; ++y)
        std::memcpy(out.data.data() + out.idx(0, y),
                    world.orthophoto.data.data() + world.orthophoto.idx(x0, y0 + y),
                    static_cast<size_t>(w) * 3);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prototype segmenter calibration sweep"};
    std::vector<double> sigmas{0.10, 0.12, 0.14, 0.16, 0.20};
    std::vector<double> temps{0.04, 0.055, 0.07, 0.09, 0.12};
    uint64_t seed = 7;
    CardParams cp;
    app.add_option("--sigmas", sigmas, "bandwidth candidates");
    app.add_option("--temps", temps, "temperature candidates");
    app.add_option("--seed", seed, "card worldgen seed");
    app.add_option("--radius", cp.radius, "card plant radius (m)");
    app.add_option("--row-spacing", cp.row_spacing, "card row spacing (m)");
    app.add_option("--plant-spacing", cp.plant_spacing, "card plant spacing (m)");
    app.add_option("--weed-density", cp.weed_density, "card weed blobs per m^2");
    app.add_option("--noise", cp.noise, "card channel noise sigma");
    CLI11_PARSE(app, argc, argv);

    const worldgen::FieldWorld world = worldgen::generate_field(card_spec(seed, cp));
    const ImageU8 card = center_crop(world, 640, 480);
    const controller::ControllerConfig ctrl = controller::ControllerConfig::defaults();

    std::printf("# card: %d x %d px, vegetated fraction target ~0.35\n", card.width,
                card.height);
    std::printf("sigma temp |");
    for (int k : {1, 3, 5, 7, 9, 11}) std::printf("   k=%-2d cr/cl/G    |", k);
    std::printf("\n");

    for (double sigma : sigmas) {
        for (double temp : temps) {
            perception::SegmenterConfig cfg = perception::SegmenterConfig::defaults();
            cfg.sigma = sigma;
            cfg.temperature = temp;
            const perception::PrototypeSegmenter seg(cfg);
            std::printf("%.3f %.3f |", sigma, temp);
            for (int k : {1, 3, 5, 7, 9, 11}) {
                const ImageU8 blurred = sensor::apply_motion_blur(card, k, {1.0, 0.0});
                const perception::SegmentationResult r = seg.segment(blurred);
                const double cr = controller::coverage_ratio(r);
                const double cl = controller::confidence_level(r);
                const double g = controller::gain(ctrl, cr, cl).gain;
                std::printf(" %.2f/%.3f/%+.2f |", cr, cl, g);
            }
            std::printf("\n");
        }
    }
    return 0;
}
