#pragma once

#include <cstdio>
#include <string>

#include "scenegen/layout.hpp"

namespace scenegen {

/// Top-down vector rendering: one rectangle per footprint, an arrow for the
/// facing direction, a label per asset id. `rotation` (0/90/180/270) turns the
/// whole scene for the four-view evaluation protocol.
inline std::string render_svg(const PlacedScene& scene, int rotation = 0, double px_per_m = 60.0) {
    if (rotation % 90 != 0 || rotation < 0 || rotation >= 360)
        throw Error(ErrorKind::input, "render: rotation must be 0, 90, 180 or 270");

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    const double margin = 0.5; // meters
    const bool swapped = rotation == 90 || rotation == 270;
    const double rw = swapped ? scene.room.depth : scene.room.width;
    const double rd = swapped ? scene.room.width : scene.room.depth;

    // world -> rotated world
    auto rot = [&](double x, double y) {
        switch (rotation) {
            case 90: return Vec2{scene.room.depth - y, x};
            case 180: return Vec2{scene.room.width - x, scene.room.depth - y};
            case 270: return Vec2{y, scene.room.width - x};
            default: return Vec2{x, y};
        }
    };
    // rotated world -> svg (y axis flipped)
    auto sx = [&](double x) { return (x + margin) * px_per_m; };
    auto sy = [&](double y) { return (rd - y + margin) * px_per_m; };

    double width_px = (rw + 2 * margin) * px_per_m;
    double height_px = (rd + 2 * margin) * px_per_m;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_px) + "\" height=\"" +
           fmt(height_px) + "\" viewBox=\"0 0 " + fmt(width_px) + " " + fmt(height_px) + "\">\n";
    svg += "<rect x=\"" + fmt(sx(0)) + "\" y=\"" + fmt(sy(rd)) + "\" width=\"" +
           fmt(rw * px_per_m) + "\" height=\"" + fmt(rd * px_per_m) +
           "\" fill=\"#fbfaf7\" stroke=\"#333\" stroke-width=\"2\"/>\n";

    for (const auto& p : scene.placements) {
        Vec2 c = rot(p.x, p.y);
        double bw = (swapped ? p.bbox.d : p.bbox.w) * px_per_m;
        double bd = (swapped ? p.bbox.w : p.bbox.d) * px_per_m;
        std::string fill = p.z > 1e-9 ? "#cfe3f5" : "#e4dfd2";
        svg += "<rect x=\"" + fmt(sx(c.x) - bw / 2) + "\" y=\"" + fmt(sy(c.y) - bd / 2) +
               "\" width=\"" + fmt(bw) + "\" height=\"" + fmt(bd) + "\" fill=\"" + fill +
               "\" stroke=\"#555\" stroke-width=\"1\"/>\n";
        // facing arrow
        Vec2 dir = geo::yaw_dir((p.yaw + rotation) % 360);
        double len = 0.35 * std::min(p.bbox.w, p.bbox.d) * px_per_m + 6.0;
        double x1 = sx(c.x), y1 = sy(c.y);
        double x2 = sx(c.x) + dir.x * len, y2 = sy(c.y) - dir.y * len;
        svg += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
               fmt(y2) + "\" stroke=\"#b2462e\" stroke-width=\"2\"/>\n";
        svg += "<circle cx=\"" + fmt(x2) + "\" cy=\"" + fmt(y2) +
               "\" r=\"2.5\" fill=\"#b2462e\"/>\n";
        svg += "<text x=\"" + fmt(x1) + "\" y=\"" + fmt(y1 - bd / 2 - 3) +
               "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
               p.asset_id + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace scenegen
