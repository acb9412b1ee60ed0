#pragma once

#include <string>
#include <vector>

#include "fieldscan/geometry.hpp"
#include "fieldscan/sensor.hpp"

namespace fieldscan::planner {

struct MegaCell {
    int i = 0;  // column, +x
    int j = 0;  // row, +y
    bool operator==(const MegaCell&) const = default;
};

// Coarse decomposition of the polygon: mega-cells are 2x2 groups of subcells
// and pass the full-inclusion test; subcell spacing is the flight lane pitch.
struct GridMap {
    Vec2 origin;               // world point of subcell (0,0)'s low corner
    double mega_cell_size = 0.0;
    double subcell_size = 0.0;
    int cols = 0;              // bounding box, mega cells
    int rows = 0;
    std::vector<uint8_t> occupancy;  // cols*rows, row-major from origin

    bool contains(int i, int j) const {
        return i >= 0 && i < cols && j >= 0 && j < rows &&
               occupancy[static_cast<size_t>(j) * cols + i] != 0;
    }
    size_t cell_count() const;
    std::vector<MegaCell> cells() const;  // ordered by (j, i)
    Vec2 mega_center(MegaCell c) const;
    Vec2 subcell_center(int u, int v) const;
};

struct TreeEdge {
    MegaCell a;
    MegaCell b;
    bool operator==(const TreeEdge&) const = default;
};

struct PlanParams {
    double overlap = 0.70;   // side-lap fraction o
    double altitude_m = 10.0;
    double dt = 1.0;
    int start_u = 0;         // start subcell (global subcell indices)
    int start_v = 0;
};

struct CoveragePlan {
    geometry::Polyline path;  // closed, subcell centers
    GridMap grid;
    PlanParams params;
};

// Lane pitch from the side-lap: subcell = footprint width x (1 - o);
// mega cells are the 2x2 groupings fully inside the polygon.
GridMap discretize(const geometry::Polygon& poly, const geometry::FieldFrame& frame,
                   const sensor::CameraModel& camera, double overlap);

// Deterministic spanning tree grown depth-first from the lowest-index cell
// with neighbor preference right, down, left, up (unit edge weights).
std::vector<TreeEdge> build_mst(const GridMap& grid);

// Clockwise circumnavigation of the tree at subcell resolution; on grids
// whose mega-cells form a full rectangle every subcell appears exactly once.
CoveragePlan stc_path(const GridMap& grid, const std::vector<TreeEdge>& mst,
                      int start_u, int start_v);

// Convenience: discretize + tree + circumnavigation from the default start
// (lowest-index subcell of the lowest-index mega-cell).
CoveragePlan plan_coverage(const geometry::Polygon& poly,
                           const geometry::FieldFrame& frame,
                           const sensor::CameraModel& camera,
                           const PlanParams& params);

// Plain-text waypoint export: `x y` per line (6 decimals) with a header
// comment carrying the grid parameters.
std::string waypoints_text(const CoveragePlan& plan);

}  // namespace fieldscan::planner
