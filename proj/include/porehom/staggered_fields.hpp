#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "porehom/mac_layout.hpp"

namespace porehom {

/// Read access to face-normal velocities stored per face DOF; faces that are
/// not DOFs (walls, solid) read as zero.
template <class V>
struct VelocityView {
    const MacLayout& layout;
    const std::vector<V>& ux;
    const std::vector<V>& uy;

    V x(int i, int j) const
    {
        const int d = layout.xface(i, j);
        return d < 0 ? V(0.0) : ux[static_cast<std::size_t>(d)];
    }
    V y(int i, int j) const
    {
        const int d = layout.yface(i, j);
        return d < 0 ? V(0.0) : uy[static_cast<std::size_t>(d)];
    }
};

/// Staggered velocity field: x-components on x-faces, y-components on
/// y-faces, one value per face DOF of the layout. Zero on wall faces.
struct CellVelocity {
    std::vector<double> ux;
    std::vector<double> uy;

    static CellVelocity zeros(const MacLayout& layout)
    {
        return {std::vector<double>(static_cast<std::size_t>(layout.n_xfaces()), 0.0),
                std::vector<double>(static_cast<std::size_t>(layout.n_yfaces()), 0.0)};
    }

    VelocityView<double> view(const MacLayout& layout) const { return {layout, ux, uy}; }

    /// Cell-centered components from the mean of the two opposing faces.
    std::pair<double, double> at_center(const MacLayout& layout, int i, int j) const
    {
        const auto v = view(layout);
        return {0.5 * (v.x(i, j) + v.x(i + 1, j)), 0.5 * (v.y(i, j) + v.y(i, j + 1))};
    }

    double max_abs() const
    {
        double m = 0.0;
        for (double a : ux) m = std::max(m, std::abs(a));
        for (double a : uy) m = std::max(m, std::abs(a));
        return m;
    }
};

/// Discrete divergence of `weight * v` per fluid cell, with the weight
/// interpolated to faces by the arithmetic mean of the adjacent cells.
/// Pass an empty weight for the plain divergence.
inline std::vector<double> weighted_divergence(const MacLayout& layout, const CellVelocity& v,
                                               const std::vector<double>& cell_weight)
{
    const auto view = v.view(layout);
    const double h = layout.h();
    std::vector<double> div(static_cast<std::size_t>(layout.n_cells()));
    for (int c = 0; c < layout.n_cells(); ++c) {
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        // Face weight: mean with the neighbor, or the own value at walls and open boundaries.
        auto face_w = [&](int ni, int nj) {
            if (cell_weight.empty()) return 1.0;
            const double own = cell_weight[static_cast<std::size_t>(c)];
            const int nb = layout.cell(ni, nj);
            return nb < 0 ? own : 0.5 * (own + cell_weight[static_cast<std::size_t>(nb)]);
        };
        const double east = face_w(i + 1, j) * view.x(i + 1, j);
        const double west = face_w(i - 1, j) * view.x(i, j);
        const double north = face_w(i, j + 1) * view.y(i, j + 1);
        const double south = face_w(i, j - 1) * view.y(i, j);
        div[static_cast<std::size_t>(c)] = (east - west + north - south) / h;
    }
    return div;
}

}  // namespace porehom
