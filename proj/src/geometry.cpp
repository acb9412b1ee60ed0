#include "fieldscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fieldscan {

std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace fieldscan

namespace fieldscan::geometry {

void FieldFrame::validate() const {
    if (!(gsd > 0.0)) throw ValidationError("field frame gsd must be > 0");
    if (raster_width <= 0 || raster_height <= 0)
        throw ValidationError("field frame raster dims must be > 0");
}

PixelCoord world_to_raster(Vec2 p, const FieldFrame& frame) {
    frame.validate();
    const double fx = (p.x - frame.origin_world.x) / frame.gsd;
    const double fy = (frame.origin_world.y - p.y) / frame.gsd;
    const int col = static_cast<int>(std::floor(fx));
    const int row = static_cast<int>(std::floor(fy));
    if (col < 0 || col >= frame.raster_width)
        throw RangeError("point x out of frame extent");
    if (row < 0 || row >= frame.raster_height)
        throw RangeError("point y out of frame extent");
    return {col, row};
}

Vec2 raster_to_world(PixelCoord px, const FieldFrame& frame) {
    return {frame.origin_world.x + (px.col + 0.5) * frame.gsd,
            frame.origin_world.y - (px.row + 0.5) * frame.gsd};
}

namespace {

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    const double c = cross(b - a, p - a);
    if (std::abs(c) > 1e-12 * (1.0 + std::abs(dot(b - a, b - a)))) return false;
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

void Polygon::validate() const {
    if (vertices.size() < 3)
        throw ValidationError("polygon needs at least 3 vertices");
    if (area() <= 0.0)
        throw ValidationError("polygon is degenerate (zero area)");
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // Skip segments sharing an endpoint.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(vertices[i], vertices[(i + 1) % n],
                                            vertices[j], vertices[(j + 1) % n]))
                throw ValidationError("polygon is self-intersecting");
        }
    }
}

double Polygon::area() const {
    double a = 0.0;
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) a += cross(vertices[i], vertices[(i + 1) % n]);
    return std::abs(a) * 0.5;
}

bool Polygon::contains(Vec2 p) const {
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i)
        if (on_segment(vertices[i], vertices[(i + 1) % n], p)) return true;
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = vertices[i], b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool polygon_contains_cell(const Polygon& poly, Vec2 cell_center, double cell_size) {
    if (!(cell_size > 0.0)) throw ValidationError("cell_size must be > 0");
    poly.validate();
    const double h = cell_size * 0.5;
    const Vec2 corners[4] = {{cell_center.x - h, cell_center.y - h},
                             {cell_center.x + h, cell_center.y - h},
                             {cell_center.x + h, cell_center.y + h},
                             {cell_center.x - h, cell_center.y + h}};
    for (const Vec2& c : corners)
        if (!poly.contains(c)) return false;
    return true;
}

Polygon clip_polygon_to_rect(const Polygon& poly, Vec2 lo, Vec2 hi) {
    auto clip_edge = [](const std::vector<Vec2>& in, auto inside, auto intersect) {
        std::vector<Vec2> out;
        const size_t n = in.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2 cur = in[i];
            const Vec2 prev = in[(i + n - 1) % n];
            const bool cin = inside(cur), pin = inside(prev);
            if (cin) {
                if (!pin) out.push_back(intersect(prev, cur));
                out.push_back(cur);
            } else if (pin) {
                out.push_back(intersect(prev, cur));
            }
        }
        return out;
    };
    auto lerp_x = [](Vec2 a, Vec2 b, double x) {
        const double t = (x - a.x) / (b.x - a.x);
        return Vec2{x, a.y + t * (b.y - a.y)};
    };
    auto lerp_y = [](Vec2 a, Vec2 b, double y) {
        const double t = (y - a.y) / (b.y - a.y);
        return Vec2{a.x + t * (b.x - a.x), y};
    };

    std::vector<Vec2> v = poly.vertices;
    v = clip_edge(v, [&](Vec2 p) { return p.x >= lo.x; },
                  [&](Vec2 a, Vec2 b) { return lerp_x(a, b, lo.x); });
    if (!v.empty())
        v = clip_edge(v, [&](Vec2 p) { return p.x <= hi.x; },
                      [&](Vec2 a, Vec2 b) { return lerp_x(a, b, hi.x); });
    if (!v.empty())
        v = clip_edge(v, [&](Vec2 p) { return p.y >= lo.y; },
                      [&](Vec2 a, Vec2 b) { return lerp_y(a, b, lo.y); });
    if (!v.empty())
        v = clip_edge(v, [&](Vec2 p) { return p.y <= hi.y; },
                      [&](Vec2 a, Vec2 b) { return lerp_y(a, b, hi.y); });

    // Drop consecutive duplicates the clipper can introduce at rect corners.
    Polygon out;
    for (const Vec2& p : v) {
        if (!out.vertices.empty()) {
            const Vec2 d = p - out.vertices.back();
            if (std::abs(d.x) < 1e-12 && std::abs(d.y) < 1e-12) continue;
        }
        out.vertices.push_back(p);
    }
    while (out.vertices.size() >= 2) {
        const Vec2 d = out.vertices.front() - out.vertices.back();
        if (std::abs(d.x) < 1e-12 && std::abs(d.y) < 1e-12) out.vertices.pop_back();
        else break;
    }
    return out;
}

void Polyline::validate() const {
    if (points.size() < 2) throw ValidationError("polyline needs at least 2 points");
}

double Polyline::total_length() const {
    double len = 0.0;
    for (size_t i = 1; i < points.size(); ++i) {
        const Vec2 d = points[i] - points[i - 1];
        len += std::hypot(d.x, d.y);
    }
    return len;
}

bool Polyline::closed() const {
    return points.size() >= 2 && points.front() == points.back();
}

std::pair<Vec2, Vec2> arc_position(const Polyline& line, double d) {
    line.validate();
    const double total = line.total_length();
    if (d < 0.0 || d > total + 1e-9)
        throw RangeError("arc length out of [0, total_length]");
    d = std::min(d, total);

    double acc = 0.0;
    for (size_t i = 1; i < line.points.size(); ++i) {
        const Vec2 a = line.points[i - 1], b = line.points[i];
        const Vec2 seg = b - a;
        const double len = std::hypot(seg.x, seg.y);
        if (len <= 0.0) continue;
        // Strict < keeps joint positions on the outgoing segment; the final
        // segment also absorbs d == total.
        if (d < acc + len || i + 1 == line.points.size()) {
            const double t = std::clamp((d - acc) / len, 0.0, 1.0);
            const Vec2 heading{seg.x / len, seg.y / len};
            return {{a.x + seg.x * t, a.y + seg.y * t}, heading};
        }
        acc += len;
    }
    throw RangeError("arc length out of [0, total_length]");  // unreachable
}

}  // namespace fieldscan::geometry
