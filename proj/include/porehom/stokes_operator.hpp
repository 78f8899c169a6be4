#pragma once

// Staggered finite-volume discretization of the viscous stress, pressure
// gradient and weighted mass flux, written once over the scalar type so the
// same code yields residual values and exact sparse Jacobians.
//
// Stress: mu (grad v + grad v^T - 2/3 (div v) I). Normal stresses live at cell
// centers, shear stresses at cell corners with the corner viscosity taken as
// the mean over the adjacent fluid cells. Tangential velocities behind a wall
// use the Navier-slip ghost value g * (mirror value), g = (2 lambda - h) / (2 lambda + h).
//
// Bounded x-layouts: a ghost column outside each end copies the adjacent
// cell's viscosity, solid flag and y-velocity, the x-velocity has zero normal
// gradient there, and the ghost pressure makes the face value equal to the
// prescribed boundary pressure.

#include <algorithm>
#include <vector>

#include "porehom/mac_layout.hpp"
#include "porehom/sparse_dual.hpp"

namespace porehom {

struct FlowOperator {
    double inv_re = 1.0;        // 1 / Re
    double euler = 1.0;         // pressure-gradient coefficient
    double ghost_factor = -1.0; // (2 lambda - h) / (2 lambda + h)
    double p_inlet = 0.0;       // bounded layouts only
    double p_outlet = 0.0;

    static double slip_ghost_factor(double slip_length, double h) { return (2.0 * slip_length - h) / (2.0 * slip_length + h); }
};

/// Stencil access for unknowns of type T and cell coefficients of type C
/// (C is either double or T).
template <class T, class C>
class FlowStencil {
public:
    FlowStencil(const MacLayout& layout, const FlowOperator& op, const std::vector<T>& ux, const std::vector<T>& uy,
                const std::vector<T>& p, const std::vector<C>& mu)
        : layout_(layout), op_(op), ux_(ux), uy_(uy), p_(p), mu_(mu)
    {
    }

    int column(int i) const { return layout_.periodic_x() ? i : std::clamp(i, 0, layout_.nx() - 1); }
    bool solid(int i, int j) const { return layout_.solid(column(i), j); }

    T ux(int i, int j) const
    {
        if (!layout_.periodic_x()) i = std::clamp(i, 0, layout_.nx());
        const int d = layout_.xface(i, j);
        return d < 0 ? T(0.0) : ux_[static_cast<std::size_t>(d)];
    }

    T uy(int i, int j) const
    {
        const int d = layout_.yface(column(i), j);
        return d < 0 ? T(0.0) : uy_[static_cast<std::size_t>(d)];
    }

    const C& mu(int i, int j) const { return mu_[static_cast<std::size_t>(layout_.cell(column(i), j))]; }

    T p(int i, int j) const
    {
        if (!layout_.inside_x(i)) {
            const int c = layout_.cell(column(i), j);
            const double bc = i < 0 ? op_.p_inlet : op_.p_outlet;
            return 2.0 * bc - p_[static_cast<std::size_t>(c)];
        }
        return p_[static_cast<std::size_t>(layout_.cell(i, j))];
    }

    T divergence(int i, int j) const
    {
        return (ux(i + 1, j) - ux(i, j) + uy(i, j + 1) - uy(i, j)) / layout_.h();
    }

    T stress_xx(int i, int j) const
    {
        const double h = layout_.h();
        return mu(i, j) * (2.0 * (ux(i + 1, j) - ux(i, j)) / h - (2.0 / 3.0) * divergence(i, j));
    }

    T stress_yy(int i, int j) const
    {
        const double h = layout_.h();
        return mu(i, j) * (2.0 * (uy(i, j + 1) - uy(i, j)) / h - (2.0 / 3.0) * divergence(i, j));
    }

    /// Shear stress at the corner point (i h, j h).
    T stress_xy(int i, int j) const
    {
        const bool sw = solid(i - 1, j - 1);
        const bool se = solid(i, j - 1);
        const bool nw = solid(i - 1, j);
        const bool ne = solid(i, j);
        if (sw && se && nw && ne) return T(0.0);

        C mu_sum(0.0);
        int fluid = 0;
        auto add_mu = [&](bool s, int ci, int cj) {
            if (s) return;
            mu_sum += mu(ci, cj);
            ++fluid;
        };
        add_mu(sw, i - 1, j - 1);
        add_mu(se, i, j - 1);
        add_mu(nw, i - 1, j);
        add_mu(ne, i, j);

        const double g = op_.ghost_factor;
        const double h = layout_.h();
        // Difference across the corner of two tangential face values, either of
        // which may sit inside the solid.
        auto jump = [&](bool first_solid, bool second_solid, auto&& first, auto&& second) -> T {
            if (first_solid && second_solid) return T(0.0);
            if (first_solid) {
                T b = second();
                return (g * b - b) / h;
            }
            if (second_solid) {
                T a = first();
                return (a - g * a) / h;
            }
            return (first() - second()) / h;
        };
        T dudy = jump(nw && ne, sw && se, [&] { return ux(i, j); }, [&] { return ux(i, j - 1); });
        T dvdx = jump(se && ne, sw && nw, [&] { return uy(i, j); }, [&] { return uy(i - 1, j); });
        return (mu_sum / static_cast<double>(fluid)) * (dudy + dvdx);
    }

    /// -(1/Re) div(stress) + Eu grad p, x-component at x-face (i, j).
    T momentum_x(int i, int j) const
    {
        const double h = layout_.h();
        T visc = (stress_xx(i, j) - stress_xx(i - 1, j)) / h + (stress_xy(i, j + 1) - stress_xy(i, j)) / h;
        return -op_.inv_re * visc + (op_.euler / h) * (p(i, j) - p(i - 1, j));
    }

    /// y-component at y-face (i, j).
    T momentum_y(int i, int j) const
    {
        const double h = layout_.h();
        T visc = (stress_yy(i, j) - stress_yy(i, j - 1)) / h + (stress_xy(i + 1, j) - stress_xy(i, j)) / h;
        return -op_.inv_re * visc + (op_.euler / h) * (p(i, j) - p(i, j - 1));
    }

private:
    const MacLayout& layout_;
    const FlowOperator& op_;
    const std::vector<T>& ux_;
    const std::vector<T>& uy_;
    const std::vector<T>& p_;
    const std::vector<C>& mu_;
};

/// Adds the stress/pressure operator at every face DOF.
template <class T, class C>
void add_stokes_operator(const MacLayout& layout, const FlowOperator& op, const std::vector<T>& ux,
                         const std::vector<T>& uy, const std::vector<T>& p, const std::vector<C>& mu,
                         std::vector<T>& out_x, std::vector<T>& out_y)
{
    const FlowStencil<T, C> s(layout, op, ux, uy, p, mu);
    for (int f = 0; f < layout.n_xfaces(); ++f) {
        const auto [i, j] = layout.xfaces()[static_cast<std::size_t>(f)];
        out_x[static_cast<std::size_t>(f)] += s.momentum_x(i, j);
    }
    for (int f = 0; f < layout.n_yfaces(); ++f) {
        const auto [i, j] = layout.yfaces()[static_cast<std::size_t>(f)];
        out_y[static_cast<std::size_t>(f)] += s.momentum_y(i, j);
    }
}

/// Adds div(rho v) per fluid cell, face densities by the mean of the adjacent
/// cells (the own value at open boundaries).
template <class T, class C>
void add_mass_flux(const MacLayout& layout, const std::vector<T>& ux, const std::vector<T>& uy,
                   const std::vector<C>& rho, std::vector<T>& out)
{
    const double h = layout.h();
    for (int c = 0; c < layout.n_cells(); ++c) {
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        const C& own = rho[static_cast<std::size_t>(c)];
        auto face_flux = [&](int d, const std::vector<T>& comp, int ni, int nj) -> T {
            if (d < 0) return T(0.0);
            const int nb = layout.cell(ni, nj);
            const C rf = nb < 0 ? own : 0.5 * (own + rho[static_cast<std::size_t>(nb)]);
            return rf * comp[static_cast<std::size_t>(d)];
        };
        T div = face_flux(layout.xface(i + 1, j), ux, i + 1, j) - face_flux(layout.xface(i, j), ux, i - 1, j) +
                face_flux(layout.yface(i, j + 1), uy, i, j + 1) - face_flux(layout.yface(i, j), uy, i, j - 1);
        out[static_cast<std::size_t>(c)] += div / h;
    }
}

}  // namespace porehom
