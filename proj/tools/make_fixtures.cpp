// Regenerates the golden fixtures (controller value table, reference STC
// paths, blur-degradation curve). With --check, regenerates into memory and
// fails with a diff report when a committed fixture drifted.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "fieldscan/cli.hpp"

namespace fs = std::filesystem;
using namespace fieldscan;

namespace {

std::string f9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

std::string controller_golden_csv() {
    const controller::ControllerConfig cfg = controller::ControllerConfig::defaults();
    // Rows cover the four snapshot regimes plus the knot anchors.
    const std::pair<double, double> cases[] = {
        {0.0, 1.0},  {0.35, 0.80}, {0.05, 0.40}, {0.05, 0.95}, {1.0, 1.0},
        {0.15, 0.5}, {0.15, 0.75}, {0.15, 1.0},  {0.4, 2.0 / 3.0}, {0.05, 0.5},
        {0.3, 0.9},  {0.5, 0.6},
    };
    std::string out = "cr,cl,g1,g2,w1,w2,G\n";
    for (const auto& [cr, cl] : cases) {
        const controller::GainBreakdown gb = controller::gain(cfg, cr, cl);
        out += f9(cr) + "," + f9(cl) + "," + f9(gb.g1) + "," + f9(gb.g2) + "," +
               f9(gb.w1) + "," + f9(gb.w2) + "," + f9(gb.gain) + "\n";
    }
    return out;
}

planner::GridMap make_grid(int cols, int rows, std::vector<std::pair<int, int>> holes,
                           double subcell = 1.0) {
    planner::GridMap grid;
    grid.origin = {0.0, 0.0};
    grid.subcell_size = subcell;
    grid.mega_cell_size = 2.0 * subcell;
    grid.cols = cols;
    grid.rows = rows;
    grid.occupancy.assign(static_cast<size_t>(cols) * rows, 1);
    for (auto [i, j] : holes) grid.occupancy[static_cast<size_t>(j) * cols + i] = 0;
    return grid;
}

std::string stc_paths_csv() {
    struct Ref {
        const char* name;
        planner::GridMap grid;
    };
    const Ref refs[] = {
        {"single", make_grid(1, 1, {})},
        {"rect2x2", make_grid(2, 2, {})},
        {"lshape", make_grid(2, 2, {{1, 1}})},
        {"rect4x3", make_grid(4, 3, {})},
        {"plus", make_grid(3, 3, {{0, 0}, {2, 0}, {0, 2}, {2, 2}})},
    };
    std::string out = "grid,step,x,y\n";
    for (const Ref& ref : refs) {
        const auto mst = planner::build_mst(ref.grid);
        const auto cells = ref.grid.cells();
        const planner::CoveragePlan plan =
            planner::stc_path(ref.grid, mst, 2 * cells.front().i, 2 * cells.front().j);
        int step = 0;
        for (const Vec2& p : plan.path.points)
            out += std::string(ref.name) + "," + std::to_string(step++) + "," +
                   f9(p.x) + "," + f9(p.y) + "\n";
    }
    return out;
}

std::string blur_curve_csv() {
    // Same card the calibration sweep uses, frozen at the committed defaults.
    worldgen::FieldSpec spec;
    spec.width_m = 12.8;
    spec.height_m = 9.6;
    spec.gsd = 0.02;
    spec.seed = 7;
    spec.row_spacing_m = 0.8;
    spec.plant_spacing_m = 0.9;
    spec.plant_radius_m = 0.30;
    spec.plant_jitter = 0.25;
    spec.weed_density = 0.35;
    const worldgen::FieldWorld world = worldgen::generate_field(spec);
    ImageU8 card(640, 480, 3);
    const int x0 = (world.frame.raster_width - 640) / 2;
    const int y0 = (world.frame.raster_height - 480) / 2;
    for (int y = 0; y < 480; ++y)
        std::memcpy(card.data.data() + card.idx(0, y),
                    world.orthophoto.data.data() + world.orthophoto.idx(x0, y0 + y),
                    640u * 3u);

    const perception::PrototypeSegmenter seg(perception::SegmenterConfig::defaults());
    const controller::ControllerConfig ctrl = controller::ControllerConfig::defaults();
    std::string out = "k,cr,cl,G\n";
    for (int k : {1, 3, 5, 7, 9}) {
        const ImageU8 blurred = sensor::apply_motion_blur(card, k, {1.0, 0.0});
        const perception::SegmentationResult r = seg.segment(blurred);
        const double cr = controller::coverage_ratio(r);
        const double cl = controller::confidence_level(r);
        out += std::to_string(k) + "," + f9(cr) + "," + f9(cl) + "," +
               f9(controller::gain(ctrl, cr, cl).gain) + "\n";
    }
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read fixture: " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int report_drift(const std::string& name, const std::string& fresh,
                 const std::string& committed) {
    if (fresh == committed) return 0;
    std::fprintf(stderr, "fixture drift in %s:\n", name.c_str());
    std::istringstream a(committed), b(fresh);
    std::string la, lb;
    int line = 0;
    while (true) {
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool gb = static_cast<bool>(std::getline(b, lb));
        ++line;
        if (!ga && !gb) break;
        if (la != lb || ga != gb) {
            std::fprintf(stderr, "  line %d:\n    committed: %s\n    regenerated: %s\n",
                         line, ga ? la.c_str() : "<eof>", gb ? lb.c_str() : "<eof>");
            break;
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"golden fixture generator / drift guard"};
    std::string dir = "tests/fixtures";
    bool check = false;
    app.add_option("--dir", dir, "fixture directory");
    app.add_flag("--check", check, "compare against committed fixtures");
    CLI11_PARSE(app, argc, argv);

    const std::map<std::string, std::string> fixtures = {
        {"controller_golden.csv", controller_golden_csv()},
        {"stc_paths.csv", stc_paths_csv()},
        {"blur_curve.csv", blur_curve_csv()},
    };

    int rc = 0;
    for (const auto& [name, content] : fixtures) {
        const fs::path path = fs::path(dir) / name;
        if (check) {
            rc |= report_drift(name, content, read_file(path));
        } else {
            fs::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << content;
            std::fprintf(stderr, "wrote %s\n", path.string().c_str());
        }
    }
    if (check && rc == 0) std::fprintf(stderr, "fixtures match\n");
    return rc;
}
