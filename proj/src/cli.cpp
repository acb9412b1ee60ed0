#include "fieldscan/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

#include "CLI11.hpp"
#include "fieldscan/png_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fieldscan::cli {

worldgen::FieldWorld build_world(const config::RunConfig& cfg) {
    if (!cfg.orthophoto_path.empty())
        return worldgen::load_field(cfg.orthophoto_path, cfg.labels_path, cfg.field.gsd);
    return worldgen::generate_field(cfg.field);
}

PreparedRun prepare(const config::RunConfig& cfg) {
    cfg.validate();
    PreparedRun out{build_world(cfg), {}, cfg.make_mission_config()};
    const geometry::Polygon poly =
        mission::mission_polygon(cfg.survey_polygon(), out.world, out.mission_config.camera);
    out.plan = planner::plan_coverage(poly, out.world.frame, out.mission_config.camera,
                                      cfg.make_plan_params());
    return out;
}

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path resolve_out_dir(std::string out_flag, const config::RunConfig& cfg) {
    std::string dir = !out_flag.empty() ? out_flag : cfg.output_dir;
    if (dir.empty()) throw ValidationError("no output directory (use --out or [output] dir)");
    fs::path p(dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("FIELDSCAN_OUT_ROOT"))
            p = fs::path(root) / p;
    }
    return p;
}

void apply_overrides(config::RunConfig& cfg, const std::string& mode,
                     double nominal_speed, int64_t seed) {
    if (!mode.empty()) {
        if (mode == "adaptive") cfg.mode = mission::Mode::adaptive;
        else if (mode == "baseline") cfg.mode = mission::Mode::baseline;
        else throw ValidationError("--mode must be adaptive or baseline");
    }
    if (nominal_speed > 0.0) cfg.controller.nominal_speed = nominal_speed;
    if (seed >= 0) cfg.field.seed = static_cast<uint64_t>(seed);
    cfg.validate();
}

ImageU8 speed_trace_plot(const mission::MissionLog& log, double dt) {
    artifacts::Series s;
    s.color = {200, 60, 40};
    double d = 0.0;
    if (!log.decisions.empty()) {
        for (const auto& dec : log.decisions) {
            s.x.push_back(d);
            s.y.push_back(dec.speed);
            d += dec.speed * dt;
        }
    } else {
        for (const auto& cap : log.captures) {
            s.x.push_back(d);
            s.y.push_back(cap.speed_at_capture);
            d += cap.speed_at_capture * dt;
        }
    }
    return artifacts::render_plot({s}, "speed vs path distance");
}

}  // namespace

mission::MissionLog fly_into(const config::RunConfig& cfg, const fs::path& run_dir,
                             bool quiet) {
    PreparedRun pr = prepare(cfg);
    pr.mission_config.keep_images = cfg.dump_captures;

    mission::MissionLog log;
    if (cfg.mode == mission::Mode::adaptive) {
        const auto segmenter = perception::make_segmenter(cfg.segmenter_name, cfg.segmenter);
        log = mission::run_adaptive(pr.world, pr.plan, pr.mission_config, *segmenter);
    } else {
        log = mission::run_baseline(pr.world, pr.plan, pr.mission_config);
    }

    fs::create_directories(run_dir);
    artifacts::atomic_write(run_dir / "config_snapshot.cfg", config::to_snapshot(cfg));
    artifacts::atomic_write(run_dir / "waypoints.txt", planner::waypoints_text(pr.plan));
    artifacts::atomic_write(run_dir / "captures.csv", artifacts::captures_csv(log.captures));
    if (!log.decisions.empty())
        artifacts::atomic_write(run_dir / "decisions.csv",
                                artifacts::decisions_csv(log.decisions));
    artifacts::atomic_write(run_dir / "summary.json",
                            artifacts::summary_json(log, cfg, pr.world.content_hash(),
                                                    pr.plan.path.points.size(),
                                                    pr.plan.path.total_length()));
    artifacts::atomic_write_png(run_dir / "speed_trace.png",
                                speed_trace_plot(log, cfg.dt));
    if (cfg.dump_captures) {
        for (size_t i = 0; i < log.images.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "%06d.png", log.captures[i].index);
            artifacts::atomic_write_png(run_dir / "captures" / name, log.images[i]);
        }
    }
    if (!quiet)
        std::fprintf(stderr, "fly: %zu captures, %.1f s, completed=%s -> %s\n",
                     log.captures.size(), log.duration_s,
                     log.completed ? "true" : "false", run_dir.string().c_str());
    return log;
}

LoadedRun load_run_dir(const fs::path& run_dir) {
    LoadedRun lr;
    lr.cfg = config::load_config((run_dir / "config_snapshot.cfg").string());

    // Captures manifest.
    std::istringstream cap_in(slurp(run_dir / "captures.csv"));
    std::string line;
    std::getline(cap_in, line);  // header
    while (std::getline(cap_in, line)) {
        if (line.empty()) continue;
        sensor::CaptureMeta m;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        row >> m.index >> m.pose.x >> m.pose.y >> m.heading.x >> m.heading.y >>
            m.speed_at_capture >> m.t >> m.blur_k >> m.crop_col >> m.crop_row;
        if (!row) throw IoError("malformed captures.csv row: " + line);
        lr.log.captures.push_back(m);
    }

    const fs::path dec_path = run_dir / "decisions.csv";
    if (fs::exists(dec_path)) {
        std::istringstream dec_in(slurp(dec_path));
        std::getline(dec_in, line);
        while (std::getline(dec_in, line)) {
            if (line.empty()) continue;
            controller::ControllerDecision d;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            row >> d.index >> d.t >> d.pose.x >> d.pose.y >> d.speed_prev >> d.cr >>
                d.cl >> d.g1 >> d.g2 >> d.w1 >> d.w2 >> d.gain >> d.unclipped >>
                d.speed;
            if (!row) throw IoError("malformed decisions.csv row: " + line);
            lr.log.decisions.push_back(d);
        }
    }

    json j = json::parse(slurp(run_dir / "summary.json"));
    lr.log.duration_s = j.at("duration_s").get<double>();
    lr.log.distance_m = j.at("distance_m").get<double>();
    lr.log.completed = j.at("completed").get<bool>();
    return lr;
}

evaluation::EvalReport eval_run_dir(const fs::path& run_dir, bool quiet) {
    LoadedRun lr = load_run_dir(run_dir);
    PreparedRun pr = prepare(lr.cfg);
    const auto segmenter =
        perception::make_segmenter(lr.cfg.segmenter_name, lr.cfg.segmenter);

    evaluation::Mosaic mosaic;
    evaluation::SsimStats ssim;
    ImageU8 class_map;
    const evaluation::EvalReport report = evaluation::evaluate_run(
        pr.world, pr.plan, lr.log, pr.mission_config, *segmenter, lr.cfg.alpha,
        lr.cfg.field.regions, &mosaic, &ssim, &class_map);

    const fs::path out = run_dir / "eval";
    fs::create_directories(out);
    artifacts::atomic_write(out / "eval_report.json", artifacts::eval_report_json(report));
    artifacts::atomic_write(out / "ssim_hist.csv",
                            artifacts::ssim_histogram_csv(report.ssim_histogram));
    artifacts::atomic_write_png(out / "ssim_map.png", artifacts::ssim_colormap(ssim.map));
    artifacts::atomic_write_png(out / "mosaic.png", mosaic.image);
    artifacts::write_class_map_png(out / "class_map.png", class_map);
    if (lr.cfg.export_scores) {
        // 16-bit score export of the mosaic's first tile row is large; export
        // the class probabilities only when explicitly requested.
        const perception::SegmentationResult seg = segmenter->segment(mosaic.image);
        Image<uint16_t> scores(seg.width(), seg.height(), 3);
        const size_t n = seg.class_map.pixel_count();
        for (size_t i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c)
                scores.data[3 * i + c] = static_cast<uint16_t>(
                    std::clamp(seg.scores[c].data[i], 0.0f, 1.0f) * 65535.0f);
        const fs::path tmp = out / "score_map.png.tmp";
        io::write_png16(tmp.string(), scores);
        fs::rename(tmp, out / "score_map.png");
    }
    if (!quiet)
        std::fprintf(stderr,
                     "eval: iou_crop=%.4f iou_weed=%.4f ssim=%.4f obj=%.4f -> %s\n",
                     report.iou_crop, report.iou_weed, report.mean_ssim,
                     report.objective_value, out.string().c_str());
    return report;
}

namespace {

int cmd_gen_field(const config::RunConfig& cfg, const fs::path& out_dir, bool quiet) {
    const worldgen::FieldWorld world = build_world(cfg);
    fs::create_directories(out_dir);
    artifacts::atomic_write_png(out_dir / "field.png", world.orthophoto);
    artifacts::atomic_write_png(out_dir / "labels.png", world.labels);
    json j;
    j["gsd"] = world.frame.gsd;
    j["width_px"] = world.frame.raster_width;
    j["height_px"] = world.frame.raster_height;
    j["world_hash"] = to_hex(world.content_hash());
    j["seed"] = cfg.field.seed;
    artifacts::atomic_write(out_dir / "world.json", j.dump(2) + "\n");
    artifacts::atomic_write(out_dir / "config_snapshot.cfg", config::to_snapshot(cfg));
    if (!quiet)
        std::fprintf(stderr, "gen-field: %dx%d px -> %s\n", world.frame.raster_width,
                     world.frame.raster_height, out_dir.string().c_str());
    return 0;
}

int cmd_plan(const config::RunConfig& cfg, const fs::path& out_dir, bool quiet) {
    PreparedRun pr = prepare(cfg);
    fs::create_directories(out_dir);
    artifacts::atomic_write(out_dir / "waypoints.txt", planner::waypoints_text(pr.plan));
    json j;
    j["mega_cells"] = pr.plan.grid.cell_count();
    j["subcell_size_m"] = pr.plan.grid.subcell_size;
    j["mega_cell_size_m"] = pr.plan.grid.mega_cell_size;
    j["waypoints"] = pr.plan.path.points.size();
    j["path_length_m"] = pr.plan.path.total_length();
    j["overlap"] = cfg.overlap;
    artifacts::atomic_write(out_dir / "plan.json", j.dump(2) + "\n");
    artifacts::atomic_write(out_dir / "config_snapshot.cfg", config::to_snapshot(cfg));
    if (!quiet)
        std::fprintf(stderr, "plan: %zu waypoints, %.1f m -> %s\n",
                     pr.plan.path.points.size(), pr.plan.path.total_length(),
                     out_dir.string().c_str());
    return 0;
}

int cmd_compare(const std::vector<std::string>& run_dirs, const fs::path& out_dir,
                bool quiet) {
    if (run_dirs.size() < 2)
        throw ValidationError("compare needs at least two run directories");
    std::vector<artifacts::RunInfo> runs;
    for (const std::string& dir : run_dirs) runs.push_back(artifacts::read_run_dir(dir));
    for (size_t i = 1; i < runs.size(); ++i)
        if (runs[i].world_hash != runs[0].world_hash)
            throw ValidationError("refusing to compare runs over different worlds: " +
                                  runs[0].dir + " vs " + runs[i].dir);
    fs::create_directories(out_dir);
    artifacts::atomic_write(out_dir / "comparison.csv", artifacts::comparison_csv(runs));

    json j;
    for (const auto& r : runs) {
        j[fs::path(r.dir).filename().string()] = {
            {"mode", r.mode},
            {"nominal_speed", r.nominal_speed},
            {"iou_sum", r.report.iou_crop + r.report.iou_weed},
            {"duration_s", r.duration_s},
            {"objective", r.report.objective_value}};
    }
    artifacts::atomic_write(out_dir / "comparison_summary.json", j.dump(2) + "\n");
    if (!quiet)
        std::fprintf(stderr, "compare: %zu runs -> %s\n", runs.size(),
                     out_dir.string().c_str());
    return 0;
}

struct SweepCell {
    double speed;
    std::string mode;
    uint64_t seed;
    fs::path dir;
};

int cmd_sweep(const config::RunConfig& base, const std::vector<double>& speeds,
              const std::vector<std::string>& modes,
              const std::vector<int64_t>& seeds, const fs::path& out_dir,
              unsigned jobs, bool quiet) {
    if (speeds.empty() || modes.empty() || seeds.empty())
        throw ValidationError("sweep needs nonempty --speeds, --modes, --seeds");
    for (const std::string& m : modes)
        if (m != "adaptive" && m != "baseline")
            throw ValidationError("sweep modes must be adaptive|baseline");

    std::vector<SweepCell> cells;
    for (int64_t seed : seeds)
        for (double s : speeds)
            for (const std::string& m : modes) {
                char name[64];
                std::snprintf(name, sizeof(name), "s%g_%s_seed%lld", s, m.c_str(),
                              static_cast<long long>(seed));
                cells.push_back({s, m, static_cast<uint64_t>(seed),
                                 out_dir / "runs" / name});
            }

    auto run_cell = [&](const SweepCell& cell) {
        config::RunConfig cfg = base;
        apply_overrides(cfg, cell.mode, cell.speed, static_cast<int64_t>(cell.seed));
        fly_into(cfg, cell.dir, true);
        eval_run_dir(cell.dir, true);
    };

    if (jobs <= 1) {
        for (const SweepCell& cell : cells) run_cell(cell);
    } else {
        std::vector<std::future<void>> pending;
        size_t next = 0;
        while (next < cells.size() || !pending.empty()) {
            while (next < cells.size() && pending.size() < jobs)
                pending.push_back(std::async(std::launch::async, run_cell,
                                             std::cref(cells[next++])));
            pending.front().get();
            pending.erase(pending.begin());
        }
    }

    // Fig-7-style aggregate: mean and variance of per-class IoU across seeds.
    std::string csv =
        "nominal_speed,mode,runs,iou_crop_mean,iou_crop_var,iou_weed_mean,"
        "iou_weed_var,iou_sum_mean,duration_mean_s\n";
    std::vector<artifacts::Series> series;
    const std::array<std::array<uint8_t, 3>, 2> colors{{{200, 60, 40}, {40, 80, 200}}};
    size_t mode_idx = 0;
    for (const std::string& m : modes) {
        artifacts::Series s;
        s.color = colors[mode_idx % colors.size()];
        s.label = m;
        for (double speed : speeds) {
            double crop_sum = 0, crop_sq = 0, weed_sum = 0, weed_sq = 0;
            double iou_total = 0, dur_sum = 0;
            int n = 0;
            for (int64_t seed : seeds) {
                char name[64];
                std::snprintf(name, sizeof(name), "s%g_%s_seed%lld", speed, m.c_str(),
                              static_cast<long long>(seed));
                const artifacts::RunInfo info =
                    artifacts::read_run_dir(out_dir / "runs" / name);
                crop_sum += info.report.iou_crop;
                crop_sq += info.report.iou_crop * info.report.iou_crop;
                weed_sum += info.report.iou_weed;
                weed_sq += info.report.iou_weed * info.report.iou_weed;
                iou_total += info.report.iou_crop + info.report.iou_weed;
                dur_sum += info.duration_s;
                ++n;
            }
            const double crop_mean = crop_sum / n;
            const double weed_mean = weed_sum / n;
            const double crop_var = std::max(0.0, crop_sq / n - crop_mean * crop_mean);
            const double weed_var = std::max(0.0, weed_sq / n - weed_mean * weed_mean);
            char row[256];
            std::snprintf(row, sizeof(row), "%g,%s,%d,%.9f,%.9f,%.9f,%.9f,%.9f,%.6f\n",
                          speed, m.c_str(), n, crop_mean, crop_var, weed_mean,
                          weed_var, iou_total / n, dur_sum / n);
            csv += row;
            s.x.push_back(speed);
            s.y.push_back(iou_total / n);
            s.band.push_back(std::sqrt(crop_var + weed_var));
        }
        series.push_back(s);
        ++mode_idx;
    }
    fs::create_directories(out_dir);
    artifacts::atomic_write(out_dir / "sweep_summary.csv", csv);
    artifacts::atomic_write_png(out_dir / "iou_vs_speed.png",
                                artifacts::render_plot(series, "iou vs nominal speed"));
    if (!quiet)
        std::fprintf(stderr, "sweep: %zu runs -> %s\n", cells.size(),
                     out_dir.string().c_str());
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"deterministic adaptive-speed coverage mission simulator"};
    app.require_subcommand(1);

    std::string config_path, out_flag, mode_flag;
    double speed_flag = -1.0;
    int64_t seed_flag = -1;
    bool quiet = false;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_flag, "output directory");
    app.add_flag("--quiet", quiet, "suppress progress messages");

    CLI::App* gen = app.add_subcommand("gen-field", "generate or import the field world");
    CLI::App* plan = app.add_subcommand("plan", "plan the coverage path");
    CLI::App* fly = app.add_subcommand("fly", "run a mission");
    fly->add_option("--mode", mode_flag, "adaptive|baseline");
    fly->add_option("--nominal-speed", speed_flag, "override nominal speed (m/s)");
    fly->add_option("--seed", seed_flag, "override worldgen seed");
    gen->add_option("--seed", seed_flag, "override worldgen seed");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a finished run directory");
    std::string eval_run;
    eval->add_option("--run", eval_run, "run directory (from fly)")->required();

    CLI::App* compare = app.add_subcommand("compare", "compare evaluated runs");
    std::vector<std::string> compare_runs;
    compare->add_option("runs", compare_runs, "run directories")->expected(-1);

    CLI::App* sweep = app.add_subcommand("sweep", "grid of speeds x modes x seeds");
    std::vector<double> sweep_speeds{3, 4, 5, 6};
    std::vector<std::string> sweep_modes{"adaptive", "baseline"};
    std::vector<int64_t> sweep_seeds{1, 2, 3};
    unsigned sweep_jobs = 1;
    sweep->add_option("--speeds", sweep_speeds, "nominal speeds");
    sweep->add_option("--modes", sweep_modes, "modes");
    sweep->add_option("--seeds", sweep_seeds, "worldgen seeds");
    sweep->add_option("--jobs", sweep_jobs, "parallel runs");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        config::RunConfig cfg = config::default_config();
        const bool needs_config = !eval->parsed() && !compare->parsed();
        if (needs_config) {
            if (config_path.empty())
                throw ValidationError("--config is required for this subcommand");
            cfg = config::load_config(config_path);
        }

        if (gen->parsed()) {
            apply_overrides(cfg, "", -1.0, seed_flag);
            return cmd_gen_field(cfg, resolve_out_dir(out_flag, cfg), quiet);
        }
        if (plan->parsed()) {
            return cmd_plan(cfg, resolve_out_dir(out_flag, cfg), quiet);
        }
        if (fly->parsed()) {
            apply_overrides(cfg, mode_flag, speed_flag, seed_flag);
            fly_into(cfg, resolve_out_dir(out_flag, cfg), quiet);
            return 0;
        }
        if (eval->parsed()) {
            eval_run_dir(eval_run, quiet);
            return 0;
        }
        if (compare->parsed()) {
            if (out_flag.empty())
                throw ValidationError("compare needs --out");
            return cmd_compare(compare_runs, out_flag, quiet);
        }
        if (sweep->parsed()) {
            return cmd_sweep(cfg, sweep_speeds, sweep_modes, sweep_seeds,
                             resolve_out_dir(out_flag, cfg), sweep_jobs, quiet);
        }
        throw ValidationError("no subcommand given");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace fieldscan::cli
