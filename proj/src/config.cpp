#include "fieldscan/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fieldscan::config {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

struct Section {
    std::string kind;  // e.g. "field", "region"
    std::string arg;   // region name
    std::map<std::string, Entry> entries;
    int line = 0;
    bool known = false;
};

class Doc {
public:
    Doc(const std::string& text, std::string source) : source_(std::move(source)) {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        Section* cur = nullptr;
        while (std::getline(in, raw)) {
            ++lineno;
            std::string line = raw;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "unterminated section header");
                std::string head = trim(line.substr(1, line.size() - 2));
                std::string kind = head, arg;
                const size_t sp = head.find(' ');
                if (sp != std::string::npos) {
                    kind = trim(head.substr(0, sp));
                    arg = trim(head.substr(sp + 1));
                }
                sections_.push_back({kind, arg, {}, lineno, false});
                cur = &sections_.back();
                continue;
            }
            const size_t eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
            if (!cur) fail(lineno, "key outside any [section]");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            if (cur->entries.count(key)) fail(lineno, "duplicate key: " + key);
            cur->entries[key] = {value, lineno, false};
        }
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ValidationError(source_ + ":" + std::to_string(line) + ": " + msg);
    }

    Section* find(const std::string& kind) {
        Section* hit = nullptr;
        for (Section& s : sections_) {
            if (s.kind == kind) {
                if (hit) fail(s.line, "duplicate section [" + kind + "]");
                hit = &s;
            }
        }
        if (hit) hit->known = true;
        return hit;
    }

    std::vector<Section*> find_all(const std::string& kind) {
        std::vector<Section*> out;
        for (Section& s : sections_) {
            if (s.kind == kind) {
                s.known = true;
                out.push_back(&s);
            }
        }
        return out;
    }

    std::optional<std::string> get(Section* s, const std::string& key) {
        if (!s) return std::nullopt;
        auto it = s->entries.find(key);
        if (it == s->entries.end()) return std::nullopt;
        it->second.consumed = true;
        return it->second.value;
    }

    void finish() const {
        for (const Section& s : sections_) {
            if (!s.known)
                fail(s.line, "unknown section [" + s.kind +
                                 (s.arg.empty() ? "" : " " + s.arg) + "]");
            for (const auto& [key, e] : s.entries)
                if (!e.consumed)
                    fail(e.line, "unknown key '" + key + "' in section [" + s.kind + "]");
        }
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<Section> sections_;
};

std::vector<double> parse_nums(const std::string& raw) {
    std::vector<double> out;
    std::istringstream in(raw);
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ValidationError("not a number: " + tok);
        out.push_back(v);
    }
    return out;
}

// "x:v x:v ..." pairs.
std::vector<std::pair<double, double>> parse_pairs(const std::string& raw) {
    std::vector<std::pair<double, double>> out;
    std::istringstream in(raw);
    std::string tok;
    while (in >> tok) {
        const size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw ValidationError("expected 'x:value', got: " + tok);
        char* end = nullptr;
        const std::string a = tok.substr(0, colon), b = tok.substr(colon + 1);
        const double x = std::strtod(a.c_str(), &end);
        if (end == a.c_str() || *end != '\0') throw ValidationError("not a number: " + a);
        const double v = std::strtod(b.c_str(), &end);
        if (end == b.c_str() || *end != '\0') throw ValidationError("not a number: " + b);
        out.push_back({x, v});
    }
    return out;
}

struct Loader {
    Doc& doc;

    void number(Section* s, const std::string& key, double* out) {
        if (auto v = doc.get(s, key)) *out = parse_nums_one(*v, s, key);
    }
    void integer(Section* s, const std::string& key, int* out) {
        if (auto v = doc.get(s, key)) *out = static_cast<int>(parse_nums_one(*v, s, key));
    }
    void integer64(Section* s, const std::string& key, uint64_t* out) {
        if (auto v = doc.get(s, key)) {
            char* end = nullptr;
            *out = std::strtoull(v->c_str(), &end, 10);
            if (end == v->c_str() || *end != '\0')
                throw ValidationError("not an integer: " + *v);
        }
    }
    void boolean(Section* s, const std::string& key, bool* out) {
        if (auto v = doc.get(s, key)) {
            if (*v == "true" || *v == "1") *out = true;
            else if (*v == "false" || *v == "0") *out = false;
            else throw ValidationError("not a boolean: " + *v);
        }
    }
    void text(Section* s, const std::string& key, std::string* out) {
        if (auto v = doc.get(s, key)) *out = *v;
    }
    void color(Section* s, const std::string& key, worldgen::Rgb* out) {
        if (auto v = doc.get(s, key)) {
            const std::vector<double> n = parse_nums(*v);
            if (n.size() != 3) throw ValidationError(key + " needs 3 components");
            out->r = static_cast<uint8_t>(n[0]);
            out->g = static_cast<uint8_t>(n[1]);
            out->b = static_cast<uint8_t>(n[2]);
        }
    }
    void prototype(Section* s, const std::string& key, perception::ClassPrototype* out) {
        if (auto v = doc.get(s, key)) {
            const std::vector<double> n = parse_nums(*v);
            if (n.size() != 2) throw ValidationError(key + " needs 'hue_deg exg'");
            out->hue_deg = n[0];
            out->exg = n[1];
        }
    }

    double parse_nums_one(const std::string& raw, Section* s, const std::string& key) {
        (void)s;
        char* end = nullptr;
        const double v = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || *end != '\0')
            throw ValidationError("value of '" + key + "' is not a number: " + raw);
        return v;
    }
};

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.controller = controller::ControllerConfig::defaults();
    cfg.segmenter = perception::SegmenterConfig::defaults();
    return cfg;
}

geometry::Polygon RunConfig::survey_polygon() const {
    if (polygon) return *polygon;
    return geometry::Polygon{{{0.0, 0.0},
                              {field.width_m, 0.0},
                              {field.width_m, field.height_m},
                              {0.0, field.height_m}}};
}

mission::MissionConfig RunConfig::make_mission_config() const {
    mission::MissionConfig mc;
    mc.controller = controller;
    mc.camera = make_camera();
    mc.blur = blur;
    mc.t_max = t_max;
    mc.mode = mode;
    return mc;
}

planner::PlanParams RunConfig::make_plan_params() const {
    planner::PlanParams pp;
    pp.overlap = overlap;
    pp.altitude_m = altitude_m;
    pp.dt = dt;
    return pp;
}

void RunConfig::validate() const {
    field.validate();
    if (orthophoto_path.empty() != labels_path.empty())
        throw ValidationError("orthophoto and labels import paths must be set together");
    if (polygon) polygon->validate();
    if (image_width <= 0 || image_height <= 0)
        throw ValidationError("camera image dims must be > 0");
    if (!(altitude_m > 0.0)) throw ValidationError("altitude must be > 0");
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
    blur.validate();
    if (overlap < 0.0 || overlap >= 1.0)
        throw ValidationError("overlap must be in [0, 1)");
    controller.validate();
    if (segmenter_name.empty()) throw ValidationError("segmenter name must be set");
    segmenter.validate();
    if (!(t_max > 0.0)) throw ValidationError("t_max must be > 0");
    if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
}

RunConfig parse_config(const std::string& text, const std::string& source_name) {
    Doc doc(text, source_name);
    Loader load{doc};
    RunConfig cfg = default_config();

    Section* field = doc.find("field");
    load.number(field, "width_m", &cfg.field.width_m);
    load.number(field, "height_m", &cfg.field.height_m);
    load.number(field, "gsd", &cfg.field.gsd);
    load.integer64(field, "seed", &cfg.field.seed);
    load.number(field, "row_spacing_m", &cfg.field.row_spacing_m);
    load.number(field, "plant_spacing_m", &cfg.field.plant_spacing_m);
    load.number(field, "plant_radius_m", &cfg.field.plant_radius_m);
    load.number(field, "plant_jitter", &cfg.field.plant_jitter);
    load.number(field, "weed_density", &cfg.field.weed_density);
    load.number(field, "weed_radius_m", &cfg.field.weed_radius_m);
    load.color(field, "soil_color", &cfg.field.soil_color);
    load.color(field, "crop_color", &cfg.field.crop_color);
    load.color(field, "weed_color", &cfg.field.weed_color);
    load.number(field, "noise_sigma", &cfg.field.noise_sigma);
    load.text(field, "crop_region", &cfg.field.crop_region);
    load.text(field, "orthophoto", &cfg.orthophoto_path);
    load.text(field, "labels", &cfg.labels_path);

    for (Section* s : doc.find_all("region")) {
        if (s->arg.empty()) doc.fail(s->line, "region section needs a name: [region NAME]");
        worldgen::Region region;
        region.name = s->arg;
        if (auto v = doc.get(s, "rect")) {
            const std::vector<double> n = parse_nums(*v);
            if (n.size() != 4) doc.fail(s->line, "rect needs 'x0 y0 x1 y1'");
            region.lo = {n[0], n[1]};
            region.hi = {n[2], n[3]};
        } else {
            doc.fail(s->line, "region needs a rect");
        }
        if (auto v = doc.get(s, "weed_density"))
            region.weed_density = parse_nums(*v).at(0);
        cfg.field.regions.push_back(region);
    }

    if (Section* s = doc.find("polygon")) {
        if (auto v = doc.get(s, "vertices")) {
            const std::vector<double> n = parse_nums(*v);
            if (n.size() < 6 || n.size() % 2 != 0)
                doc.fail(s->line, "polygon vertices need >= 3 'x y' pairs");
            geometry::Polygon poly;
            for (size_t i = 0; i < n.size(); i += 2)
                poly.vertices.push_back({n[i], n[i + 1]});
            cfg.polygon = poly;
        }
    }

    Section* camera = doc.find("camera");
    load.integer(camera, "image_width", &cfg.image_width);
    load.integer(camera, "image_height", &cfg.image_height);
    load.number(camera, "altitude_m", &cfg.altitude_m);
    load.number(camera, "dt", &cfg.dt);

    if (Section* s = doc.find("blur")) {
        load.number(s, "base_speed", &cfg.blur.base_speed);
        if (auto v = doc.get(s, "table")) {
            cfg.blur.table.clear();
            for (const auto& [speed, k] : parse_pairs(*v))
                cfg.blur.table.push_back({speed, static_cast<int>(k)});
        }
    }

    if (Section* s = doc.find("planner")) load.number(s, "overlap", &cfg.overlap);

    if (Section* s = doc.find("controller")) {
        load.number(s, "nominal_speed", &cfg.controller.nominal_speed);
        load.number(s, "max_discrepancy", &cfg.controller.max_discrepancy);
        if (auto v = doc.get(s, "g1_knots")) cfg.controller.g1.knots = parse_pairs(*v);
        if (auto v = doc.get(s, "g2_knots")) cfg.controller.g2.knots = parse_pairs(*v);
        if (auto v = doc.get(s, "w1_roots")) {
            const std::vector<double> n = parse_nums(*v);
            if (n.size() != 2) doc.fail(s->line, "w1_roots needs 'r1 r2'");
            cfg.controller.w1_root_lo = n[0];
            cfg.controller.w1_root_hi = n[1];
        }
        load.number(s, "w1_peak", &cfg.controller.w1_peak);
    }

    if (Section* s = doc.find("segmenter")) {
        load.text(s, "name", &cfg.segmenter_name);
        load.number(s, "sigma", &cfg.segmenter.sigma);
        load.number(s, "temperature", &cfg.segmenter.temperature);
        load.prototype(s, "background_prototype",
                       &cfg.segmenter.prototypes[perception::kClassBackground]);
        load.prototype(s, "crop_prototype",
                       &cfg.segmenter.prototypes[perception::kClassCrop]);
        load.prototype(s, "weed_prototype",
                       &cfg.segmenter.prototypes[perception::kClassWeed]);
    }

    if (Section* s = doc.find("mission")) {
        if (auto v = doc.get(s, "mode")) {
            if (*v == "adaptive") cfg.mode = mission::Mode::adaptive;
            else if (*v == "baseline") cfg.mode = mission::Mode::baseline;
            else doc.fail(s->line, "mode must be adaptive or baseline");
        }
        load.number(s, "t_max", &cfg.t_max);
        load.boolean(s, "dump_captures", &cfg.dump_captures);
    }

    if (Section* s = doc.find("eval")) {
        load.number(s, "alpha", &cfg.alpha);
        load.boolean(s, "export_scores", &cfg.export_scores);
    }

    if (Section* s = doc.find("output")) load.text(s, "dir", &cfg.output_dir);

    doc.finish();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string to_snapshot(const RunConfig& cfg) {
    std::ostringstream out;
    const auto d = format_double;
    out << "# fieldscan run configuration snapshot\n";
    out << "[field]\n";
    out << "width_m = " << d(cfg.field.width_m) << "\n";
    out << "height_m = " << d(cfg.field.height_m) << "\n";
    out << "gsd = " << d(cfg.field.gsd) << "\n";
    out << "seed = " << cfg.field.seed << "\n";
    out << "row_spacing_m = " << d(cfg.field.row_spacing_m) << "\n";
    out << "plant_spacing_m = " << d(cfg.field.plant_spacing_m) << "\n";
    out << "plant_radius_m = " << d(cfg.field.plant_radius_m) << "\n";
    out << "plant_jitter = " << d(cfg.field.plant_jitter) << "\n";
    out << "weed_density = " << d(cfg.field.weed_density) << "\n";
    out << "weed_radius_m = " << d(cfg.field.weed_radius_m) << "\n";
    out << "soil_color = " << int(cfg.field.soil_color.r) << " "
        << int(cfg.field.soil_color.g) << " " << int(cfg.field.soil_color.b) << "\n";
    out << "crop_color = " << int(cfg.field.crop_color.r) << " "
        << int(cfg.field.crop_color.g) << " " << int(cfg.field.crop_color.b) << "\n";
    out << "weed_color = " << int(cfg.field.weed_color.r) << " "
        << int(cfg.field.weed_color.g) << " " << int(cfg.field.weed_color.b) << "\n";
    out << "noise_sigma = " << d(cfg.field.noise_sigma) << "\n";
    if (!cfg.field.crop_region.empty())
        out << "crop_region = " << cfg.field.crop_region << "\n";
    if (!cfg.orthophoto_path.empty()) {
        out << "orthophoto = " << cfg.orthophoto_path << "\n";
        out << "labels = " << cfg.labels_path << "\n";
    }
    for (const worldgen::Region& r : cfg.field.regions) {
        out << "\n[region " << r.name << "]\n";
        out << "rect = " << d(r.lo.x) << " " << d(r.lo.y) << " " << d(r.hi.x)
            << " " << d(r.hi.y) << "\n";
        if (r.weed_density) out << "weed_density = " << d(*r.weed_density) << "\n";
    }
    if (cfg.polygon) {
        out << "\n[polygon]\nvertices =";
        for (const Vec2& v : cfg.polygon->vertices)
            out << " " << d(v.x) << " " << d(v.y);
        out << "\n";
    }
    out << "\n[camera]\n";
    out << "image_width = " << cfg.image_width << "\n";
    out << "image_height = " << cfg.image_height << "\n";
    out << "altitude_m = " << d(cfg.altitude_m) << "\n";
    out << "dt = " << d(cfg.dt) << "\n";
    out << "\n[blur]\n";
    out << "base_speed = " << d(cfg.blur.base_speed) << "\n";
    if (!cfg.blur.table.empty()) {
        out << "table =";
        for (const auto& [s, k] : cfg.blur.table) out << " " << d(s) << ":" << k;
        out << "\n";
    }
    out << "\n[planner]\n";
    out << "overlap = " << d(cfg.overlap) << "\n";
    out << "\n[controller]\n";
    out << "nominal_speed = " << d(cfg.controller.nominal_speed) << "\n";
    out << "max_discrepancy = " << d(cfg.controller.max_discrepancy) << "\n";
    auto knots = [&](const controller::PiecewiseLinear& pl) {
        std::string s;
        for (const auto& [x, v] : pl.knots) s += " " + d(x) + ":" + d(v);
        return s;
    };
    out << "g1_knots =" << knots(cfg.controller.g1) << "\n";
    out << "g2_knots =" << knots(cfg.controller.g2) << "\n";
    out << "w1_roots = " << d(cfg.controller.w1_root_lo) << " "
        << d(cfg.controller.w1_root_hi) << "\n";
    out << "w1_peak = " << d(cfg.controller.w1_peak) << "\n";
    out << "\n[segmenter]\n";
    out << "name = " << cfg.segmenter_name << "\n";
    out << "sigma = " << d(cfg.segmenter.sigma) << "\n";
    out << "temperature = " << d(cfg.segmenter.temperature) << "\n";
    const char* proto_keys[3] = {"background_prototype", "crop_prototype",
                                 "weed_prototype"};
    for (int c = 0; c < 3; ++c)
        out << proto_keys[c] << " = " << d(cfg.segmenter.prototypes[c].hue_deg)
            << " " << d(cfg.segmenter.prototypes[c].exg) << "\n";
    out << "\n[mission]\n";
    out << "mode = " << (cfg.mode == mission::Mode::adaptive ? "adaptive" : "baseline")
        << "\n";
    out << "t_max = " << d(cfg.t_max) << "\n";
    out << "dump_captures = " << (cfg.dump_captures ? "true" : "false") << "\n";
    out << "\n[eval]\n";
    out << "alpha = " << d(cfg.alpha) << "\n";
    out << "export_scores = " << (cfg.export_scores ? "true" : "false") << "\n";
    if (!cfg.output_dir.empty()) {
        out << "\n[output]\n";
        out << "dir = " << cfg.output_dir << "\n";
    }
    return out.str();
}

}  // namespace fieldscan::config
