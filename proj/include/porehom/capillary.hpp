#pragma once

// Face values of div(grad u (x) grad u), the capillary stress divergence.
// Cell gradients use the contact-angle derivative on wall faces; the
// diagonal tensor entries live at cell centers, the off-diagonal entry at
// corners as the mean over the adjacent fluid cells.

#include <algorithm>
#include <vector>

#include "porehom/mac_layout.hpp"
#include "porehom/phasefield.hpp"

namespace porehom {

/// Adds scale * div(grad u (x) grad u) at every face DOF.
template <class T>
void add_capillary_divergence(const MacLayout& layout, const AllenCahnOperator& op, const std::vector<T>& u,
                              double scale, std::vector<T>& out_x, std::vector<T>& out_y)
{
    if (scale == 0.0) return;
    const double h = layout.h();
    const int n = layout.n_cells();
    std::vector<T> txx(static_cast<std::size_t>(n));
    std::vector<T> tyy(static_cast<std::size_t>(n));
    std::vector<T> txy(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        const auto [gx, gy] = cell_gradient(layout, op, u, i, j);
        txx[static_cast<std::size_t>(c)] = gx * gx;
        tyy[static_cast<std::size_t>(c)] = gy * gy;
        txy[static_cast<std::size_t>(c)] = gx * gy;
    }

    auto column = [&](int i) { return layout.periodic_x() ? i : std::clamp(i, 0, layout.nx() - 1); };
    auto cell_value = [&](const std::vector<T>& t, int i, int j) -> const T& {
        return t[static_cast<std::size_t>(layout.cell(column(i), j))];
    };
    auto corner_xy = [&](int i, int j) -> T {
        T sum(0.0);
        int fluid = 0;
        for (int dj = -1; dj <= 0; ++dj)
            for (int di = -1; di <= 0; ++di) {
                const int c = layout.cell(column(i + di), j + dj);
                if (c < 0) continue;
                sum += txy[static_cast<std::size_t>(c)];
                ++fluid;
            }
        return fluid == 0 ? T(0.0) : sum / static_cast<double>(fluid);
    };

    for (int f = 0; f < layout.n_xfaces(); ++f) {
        const auto [i, j] = layout.xfaces()[static_cast<std::size_t>(f)];
        T d = (cell_value(txx, i, j) - cell_value(txx, i - 1, j)) / h + (corner_xy(i, j + 1) - corner_xy(i, j)) / h;
        out_x[static_cast<std::size_t>(f)] += scale * d;
    }
    for (int f = 0; f < layout.n_yfaces(); ++f) {
        const auto [i, j] = layout.yfaces()[static_cast<std::size_t>(f)];
        T d = (cell_value(tyy, i, j) - cell_value(tyy, i, j - 1)) / h + (corner_xy(i + 1, j) - corner_xy(i, j)) / h;
        out_y[static_cast<std::size_t>(f)] += scale * d;
    }
}

}  // namespace porehom
