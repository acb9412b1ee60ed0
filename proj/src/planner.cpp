#include "fieldscan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <tuple>

namespace fieldscan::planner {

size_t GridMap::cell_count() const {
    size_t n = 0;
    for (uint8_t v : occupancy) n += v != 0;
    return n;
}

std::vector<MegaCell> GridMap::cells() const {
    std::vector<MegaCell> out;
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i)
            if (contains(i, j)) out.push_back({i, j});
    return out;
}

Vec2 GridMap::mega_center(MegaCell c) const {
    return {origin.x + (c.i + 0.5) * mega_cell_size,
            origin.y + (c.j + 0.5) * mega_cell_size};
}

Vec2 GridMap::subcell_center(int u, int v) const {
    return {origin.x + (u + 0.5) * subcell_size,
            origin.y + (v + 0.5) * subcell_size};
}

GridMap discretize(const geometry::Polygon& poly, const geometry::FieldFrame& frame,
                   const sensor::CameraModel& camera, double overlap) {
    if (overlap < 0.0 || overlap >= 1.0)
        throw ValidationError("overlap must be in [0, 1)");
    poly.validate();
    frame.validate();
    camera.validate();

    GridMap grid;
    grid.subcell_size = camera.footprint_width_m * (1.0 - overlap);
    grid.mega_cell_size = 2.0 * grid.subcell_size;
    if (!(grid.subcell_size > 0.0))
        throw PlanningError("degenerate subcell size");

    double minx = poly.vertices[0].x, miny = poly.vertices[0].y;
    double maxx = minx, maxy = miny;
    for (const Vec2& v : poly.vertices) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    grid.origin = {minx, miny};
    grid.cols = std::max(1, static_cast<int>(std::floor((maxx - minx) / grid.mega_cell_size)));
    grid.rows = std::max(1, static_cast<int>(std::floor((maxy - miny) / grid.mega_cell_size)));
    grid.occupancy.assign(static_cast<size_t>(grid.cols) * grid.rows, 0);

    size_t kept = 0;
    for (int j = 0; j < grid.rows; ++j) {
        for (int i = 0; i < grid.cols; ++i) {
            const Vec2 center = grid.mega_center({i, j});
            if (geometry::polygon_contains_cell(poly, center, grid.mega_cell_size)) {
                grid.occupancy[static_cast<size_t>(j) * grid.cols + i] = 1;
                ++kept;
            }
        }
    }
    if (kept == 0)
        throw PlanningError("polygon too small: no mega-cell of size " +
                            std::to_string(grid.mega_cell_size) + " m fits inside");
    return grid;
}

namespace {

// Neighbor preference order: right, down, left, up.
constexpr int kDirI[4] = {1, 0, -1, 0};
constexpr int kDirJ[4] = {0, -1, 0, 1};

MegaCell lowest_cell(const GridMap& grid) {
    for (int j = 0; j < grid.rows; ++j)
        for (int i = 0; i < grid.cols; ++i)
            if (grid.contains(i, j)) return {i, j};
    throw PlanningError("grid has no cells");
}

}  // namespace

std::vector<TreeEdge> build_mst(const GridMap& grid) {
    const size_t total = grid.cell_count();
    if (total == 0) throw PlanningError("grid has no cells");

    const MegaCell start = lowest_cell(grid);
    std::vector<uint8_t> visited(static_cast<size_t>(grid.cols) * grid.rows, 0);
    auto mark = [&](MegaCell c) { visited[static_cast<size_t>(c.j) * grid.cols + c.i] = 1; };
    auto seen = [&](MegaCell c) { return visited[static_cast<size_t>(c.j) * grid.cols + c.i] != 0; };

    std::vector<TreeEdge> edges;
    std::vector<MegaCell> stack{start};
    mark(start);
    size_t reached = 1;
    while (!stack.empty()) {
        const MegaCell c = stack.back();
        bool advanced = false;
        for (int d = 0; d < 4; ++d) {
            const MegaCell n{c.i + kDirI[d], c.j + kDirJ[d]};
            if (grid.contains(n.i, n.j) && !seen(n)) {
                mark(n);
                edges.push_back({c, n});
                stack.push_back(n);
                ++reached;
                advanced = true;
                break;
            }
        }
        if (!advanced) stack.pop_back();
    }

    if (reached != total) {
        // Report the disconnected components for the diagnostic.
        std::vector<MegaCell> stranded;
        for (const MegaCell& c : grid.cells())
            if (!seen(c)) stranded.push_back(c);
        std::string msg = "grid is disconnected; unreachable mega-cells:";
        for (size_t k = 0; k < stranded.size() && k < 8; ++k)
            msg += " (" + std::to_string(stranded[k].i) + "," +
                   std::to_string(stranded[k].j) + ")";
        if (stranded.size() > 8) msg += " ...";
        throw PlanningError(msg);
    }
    return edges;
}

namespace {

// Quadrants of a mega-cell, clockwise starting north-west.
enum Quadrant { NW = 0, NE = 1, SE = 2, SW = 3 };

struct SubState {
    MegaCell cell;
    Quadrant q;
    bool operator==(const SubState&) const = default;
    bool operator<(const SubState& o) const {
        return std::tie(cell.j, cell.i, q) < std::tie(o.cell.j, o.cell.i, o.q);
    }
};

// Side hugged while moving clockwise from quadrant q to its successor, as a
// direction index into kDirI/kDirJ: NW->NE hugs north (up), NE->SE east
// (right), SE->SW south (down), SW->NW west (left).
constexpr int kHugDir[4] = {3, 0, 1, 2};
constexpr Quadrant kNextQ[4] = {NE, SE, SW, NW};
// Entry quadrant when crossing into the neighbor across the hugged side.
constexpr Quadrant kMirrorQ[4] = {SW, NW, NE, SE};

int subcell_u(const SubState& s) { return 2 * s.cell.i + (s.q == NE || s.q == SE ? 1 : 0); }
int subcell_v(const SubState& s) { return 2 * s.cell.j + (s.q == NW || s.q == NE ? 1 : 0); }

}  // namespace

CoveragePlan stc_path(const GridMap& grid, const std::vector<TreeEdge>& mst,
                      int start_u, int start_v) {
    const MegaCell start_cell{start_u >= 0 ? start_u / 2 : -1,
                              start_v >= 0 ? start_v / 2 : -1};
    if (!grid.contains(start_cell.i, start_cell.j))
        throw RangeError("start subcell lies outside the grid");

    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> edge_set;
    for (const TreeEdge& e : mst) {
        edge_set.insert({{e.a.i, e.a.j}, {e.b.i, e.b.j}});
        edge_set.insert({{e.b.i, e.b.j}, {e.a.i, e.a.j}});
    }
    auto tree_edge = [&](MegaCell a, MegaCell b) {
        return edge_set.count({{a.i, a.j}, {b.i, b.j}}) > 0;
    };

    const Quadrant start_q = (start_v % 2 == 1)
                                 ? (start_u % 2 == 1 ? NE : NW)
                                 : (start_u % 2 == 1 ? SE : SW);

    SubState cur{start_cell, start_q};
    const SubState begin = cur;

    CoveragePlan plan;
    plan.grid = grid;
    const size_t max_steps = 8 * grid.cell_count() + 8;
    size_t steps = 0;
    do {
        plan.path.points.push_back(grid.subcell_center(subcell_u(cur), subcell_v(cur)));
        const int d = kHugDir[cur.q];
        const MegaCell n{cur.cell.i + kDirI[d], cur.cell.j + kDirJ[d]};
        if (grid.contains(n.i, n.j) && tree_edge(cur.cell, n))
            cur = {n, kMirrorQ[cur.q]};
        else
            cur = {cur.cell, kNextQ[cur.q]};
        if (++steps > max_steps)
            throw PlanningError("circumnavigation failed to close (malformed tree)");
    } while (!(cur == begin));
    plan.path.points.push_back(plan.path.points.front());  // closure

    return plan;
}

CoveragePlan plan_coverage(const geometry::Polygon& poly,
                           const geometry::FieldFrame& frame,
                           const sensor::CameraModel& camera,
                           const PlanParams& params) {
    GridMap grid = discretize(poly, frame, camera, params.overlap);
    const std::vector<TreeEdge> mst = build_mst(grid);
    const MegaCell low = lowest_cell(grid);
    CoveragePlan plan = stc_path(grid, mst, 2 * low.i, 2 * low.j);
    plan.params = params;
    plan.params.start_u = 2 * low.i;
    plan.params.start_v = 2 * low.j;
    return plan;
}

std::string waypoints_text(const CoveragePlan& plan) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "# stc coverage path: %zu mega-cells, mega %.6f m, subcell %.6f m, "
                  "overlap %.3f, altitude %.2f m, start subcell (%d, %d)\n",
                  plan.grid.cell_count(), plan.grid.mega_cell_size,
                  plan.grid.subcell_size, plan.params.overlap,
                  plan.params.altitude_m, plan.params.start_u, plan.params.start_v);
    out += buf;
    for (const Vec2& p : plan.path.points) {
        std::snprintf(buf, sizeof(buf), "%.6f %.6f\n", p.x, p.y);
        out += buf;
    }
    return out;
}

}  // namespace fieldscan::planner
