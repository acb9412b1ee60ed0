#pragma once

#include <utility>
#include <vector>

#include "fieldscan/common.hpp"

namespace fieldscan::geometry {

// Local planar frame tying a raster to world meters. origin_world is the
// outer corner of pixel (0,0); columns advance along +x, rows along -y.
// Pixel (c,r) covers [ox + c*gsd, ox + (c+1)*gsd) x (oy - (r+1)*gsd, oy - r*gsd].
struct FieldFrame {
    Vec2 origin_world{0.0, 0.0};
    double gsd = 0.0;  // meters per pixel
    int raster_width = 0;
    int raster_height = 0;

    void validate() const;
    double width_m() const { return raster_width * gsd; }
    double height_m() const { return raster_height * gsd; }
};

struct PixelCoord {
    int col = 0;
    int row = 0;
    bool operator==(const PixelCoord&) const = default;
};

PixelCoord world_to_raster(Vec2 p, const FieldFrame& frame);
Vec2 raster_to_world(PixelCoord px, const FieldFrame& frame);  // pixel-center point

struct Polygon {
    std::vector<Vec2> vertices;  // closed implicitly

    void validate() const;  // >= 3 vertices, simple, nonzero area
    double area() const;    // absolute area
    bool contains(Vec2 p) const;  // boundary counts as inside
};

// Full-cell inclusion: all four corners of the axis-aligned square cell
// centered at cell_center must be inside (or on) the polygon.
bool polygon_contains_cell(const Polygon& poly, Vec2 cell_center, double cell_size);

// Sutherland-Hodgman clip of a polygon against an axis-aligned rectangle.
// Returns an empty polygon when nothing remains.
Polygon clip_polygon_to_rect(const Polygon& poly, Vec2 lo, Vec2 hi);

struct Polyline {
    std::vector<Vec2> points;

    void validate() const;  // >= 2 points
    double total_length() const;
    bool closed() const;
};

// Point and unit heading at arc length d (linear interpolation; at joints the
// outgoing segment's heading applies, and at d == total_length the last
// segment's heading).
std::pair<Vec2, Vec2> arc_position(const Polyline& line, double d);

}  // namespace fieldscan::geometry
