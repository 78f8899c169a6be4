#pragma once

// Streamlines of staggered velocity fields on periodic unit cells, and the
// net-flow mask that removes recirculating regions from mobility integrals.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "porehom/errors.hpp"
#include "porehom/geometry.hpp"
#include "porehom/mac_layout.hpp"
#include "porehom/staggered_fields.hpp"

namespace porehom {

using Point2 = std::array<double, 2>;

enum class StreamlineEnd {
    wrapped,     // completed a full periodic traverse along the tracked axis
    stagnation,  // speed dropped below the stagnation threshold
    max_length,
    solid,       // the integrator stepped into a solid cell
};

inline const char* to_string(StreamlineEnd e)
{
    switch (e) {
    case StreamlineEnd::wrapped: return "wrapped";
    case StreamlineEnd::stagnation: return "stagnation";
    case StreamlineEnd::max_length: return "max_length";
    case StreamlineEnd::solid: return "solid";
    }
    return "unknown";
}

struct Streamline {
    std::vector<Point2> points;  // unwrapped coordinates
    StreamlineEnd end = StreamlineEnd::max_length;
    int wraps = 0;  // signed number of periodic crossings along the tracked axis
    double length = 0.0;
};

struct StreamlineOptions {
    int axis = 0;                   // axis whose periodic traverse ends the trace
    double step = 0.0;              // 0 selects h / 2
    double max_length = 0.0;        // 0 selects 50 n cell widths
    double stagnation_speed = 1e-12;
    bool backward = false;          // integrate along -v
};

/// Bilinear interpolation of the staggered field at a point (periodic).
inline Point2 interpolate_velocity(const MacLayout& layout, const CellVelocity& v, Point2 p)
{
    const auto view = v.view(layout);
    const double h = layout.h();
    auto bilinear = [&](double sx, double sy, auto&& at) {
        const double fx = std::floor(sx);
        const double fy = std::floor(sy);
        const double ax = sx - fx;
        const double ay = sy - fy;
        const int i = static_cast<int>(fx);
        const int j = static_cast<int>(fy);
        return (1 - ax) * (1 - ay) * at(i, j) + ax * (1 - ay) * at(i + 1, j) + (1 - ax) * ay * at(i, j + 1) +
               ax * ay * at(i + 1, j + 1);
    };
    // x-velocities sit at (i h, (j + 1/2) h), y-velocities at ((i + 1/2) h, j h).
    const double vx = bilinear(p[0] / h, p[1] / h - 0.5, [&](int i, int j) { return view.x(i, j); });
    const double vy = bilinear(p[0] / h - 0.5, p[1] / h, [&](int i, int j) { return view.y(i, j); });
    return {vx, vy};
}

inline std::array<int, 2> containing_cell(const MacLayout& layout, Point2 p)
{
    const double h = layout.h();
    return {layout.wrap_x(static_cast<int>(std::floor(p[0] / h))), layout.wrap_y(static_cast<int>(std::floor(p[1] / h)))};
}

/// RK2 (midpoint) integration of dx/ds = v / |v| from a seed in the fluid.
inline Streamline trace_streamline(const UnitCellGrid& grid, const CellVelocity& v, Point2 seed,
                                   const StreamlineOptions& options = {})
{
    const MacLayout layout(grid);
    if (v.ux.size() != static_cast<std::size_t>(layout.n_xfaces()) ||
        v.uy.size() != static_cast<std::size_t>(layout.n_yfaces()))
        throw ConfigError("velocity field does not match the grid");
    {
        const auto c = containing_cell(layout, seed);
        if (grid.solid(c[0], c[1])) throw ConfigError("streamline seed lies in the solid");
    }
    const double h = grid.h();
    const double step = options.step > 0.0 ? options.step : 0.5 * h;
    const double max_len = options.max_length > 0.0 ? options.max_length : 50.0 * grid.n() * h;
    const double sign = options.backward ? -1.0 : 1.0;
    const int axis = options.axis;

    Streamline line;
    line.points.push_back(seed);
    Point2 p = seed;
    auto direction = [&](Point2 q, bool& stagnant) -> Point2 {
        const Point2 w = interpolate_velocity(layout, v, q);
        const double speed = std::hypot(w[0], w[1]);
        stagnant = !(speed >= options.stagnation_speed);
        if (stagnant) return {0.0, 0.0};
        return {sign * w[0] / speed, sign * w[1] / speed};
    };

    while (line.length < max_len) {
        bool stagnant = false;
        const Point2 d1 = direction(p, stagnant);
        if (stagnant) {
            line.end = StreamlineEnd::stagnation;
            return line;
        }
        const Point2 mid{p[0] + 0.5 * step * d1[0], p[1] + 0.5 * step * d1[1]};
        const Point2 d2 = direction(mid, stagnant);
        if (stagnant) {
            line.end = StreamlineEnd::stagnation;
            return line;
        }
        p = {p[0] + step * d2[0], p[1] + step * d2[1]};
        line.length += step;
        line.points.push_back(p);
        const auto c = containing_cell(layout, p);
        if (grid.solid(c[0], c[1])) {
            line.end = StreamlineEnd::solid;
            return line;
        }
        line.wraps = static_cast<int>(std::floor(p[axis])) - static_cast<int>(std::floor(seed[axis]));
        if (std::abs(p[axis] - seed[axis]) >= 1.0) {
            line.end = StreamlineEnd::wrapped;
            return line;
        }
    }
    line.end = StreamlineEnd::max_length;
    return line;
}

/// Fluid cells that carry net through-flow along one axis.
struct NetFlowMask {
    std::vector<std::uint8_t> marked;  // per fluid cell, layout order
    int axis = 0;

    int count() const
    {
        int c = 0;
        for (auto m : marked) c += m ? 1 : 0;
        return c;
    }
};

/// Seeds one streamline per fluid face on the periodic boundary normal to
/// `axis`, traces it forwards and backwards, and marks every cell crossed by
/// a trace that completes a full periodic traverse along `axis`.
inline NetFlowMask net_flow_mask(const UnitCellGrid& grid, const CellVelocity& v, int axis,
                                 const StreamlineOptions& base = {})
{
    if (axis < 0 || axis > 1) throw ConfigError("axis index out of range");
    const MacLayout layout(grid);
    NetFlowMask mask{std::vector<std::uint8_t>(static_cast<std::size_t>(layout.n_cells()), 0), axis};
    const double h = grid.h();
    const int n = grid.n();
    for (int k = 0; k < n; ++k) {
        const bool is_face = axis == 0 ? layout.xface(0, k) >= 0 : layout.yface(k, 0) >= 0;
        if (!is_face) continue;
        const Point2 seed = axis == 0 ? Point2{0.0, (k + 0.5) * h} : Point2{(k + 0.5) * h, 0.0};
        for (bool backward : {false, true}) {
            StreamlineOptions opt = base;
            opt.axis = axis;
            opt.backward = backward;
            const Streamline line = trace_streamline(grid, v, seed, opt);
            if (line.end != StreamlineEnd::wrapped) continue;
            for (const auto& p : line.points) {
                const auto c = containing_cell(layout, p);
                const int id = layout.cell(c[0], c[1]);
                if (id >= 0) mask.marked[static_cast<std::size_t>(id)] = 1;
            }
        }
    }
    return mask;
}

}  // namespace porehom
