#pragma once

// Stokes cell problems on a frozen phase field. With the operator
//   L(w, q) = -(1/Re) div(mu(u) (grad w + grad w^T - 2/3 (div w) I)) + Eu_bar grad q
// and the constraint div(rho(u) w) = 0, the pressure-driven problem for axis j
// solves L(w_j, q_j) = Eu_bar e_j and the surface-tension problem solves
// L(w_0, q_0) = c div(grad u (x) grad u), c = 3 xi / (2 Ca). A macroscopic
// gradient g and the capillary force then give the velocity -sum_j g_j w_j - w_0.
//
// The mass rows sum to zero identically on a periodic cell, so the pressure
// is fixed by a Lagrange multiplier entering one mass row together with a
// pinned reference pressure; the multiplier vanishes for every admissible
// right-hand side and the pressure is shifted to zero mean afterwards. All
// d + 1 problems share one LU factorization.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "porehom/capillary.hpp"
#include "porehom/errors.hpp"
#include "porehom/fluid.hpp"
#include "porehom/geometry.hpp"
#include "porehom/mac_layout.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/sparse_system.hpp"
#include "porehom/staggered_fields.hpp"
#include "porehom/stokes_operator.hpp"

namespace porehom {

/// Driver tag: 0 for surface tension, j in 1..d for the pressure gradient along axis j.
constexpr int surface_tension_driver = 0;

struct CellSolution {
    CellVelocity w;
    std::vector<double> pi;  // per fluid cell, zero mean
    int driver = surface_tension_driver;
    double momentum_residual = 0.0;  // max-norm, relative to the forcing
    double mass_residual = 0.0;      // max |div(rho w)|
};

struct CellSolutions {
    std::vector<CellSolution> pressure;  // axes 0 .. d-1
    CellSolution surface;
};

/// Assembled and factorized saddle-point system for one (grid, phase field, fluid) triple.
class CellProblem {
public:
    CellProblem(const UnitCellGrid& grid, const PhaseField& u, const FluidParams& params)
        : grid_(grid), params_(params), layout_(grid)
    {
        params.validate();
        if (u.values.size() != static_cast<std::size_t>(grid.fluid_cells()))
            throw ConfigError("phase field does not match the grid");
        if (std::abs(u.xi - params.xi) > 1e-12 * params.xi)
            throw ConfigError("phase field and fluid parameters disagree on the interface width xi");
        if (!grid.has_solid())
            throw SolverError("cell problem is singular: the unit cell has no solid, so constant forcing has no periodic solution");
        if (grid.fluid_components() != 1)
            throw SolverError("cell problem is singular: the pore space has " +
                              std::to_string(grid.fluid_components()) + " disconnected components");

        u_ = u.values;
        mu_.resize(u_.size());
        rho_.resize(u_.size());
        for (std::size_t c = 0; c < u_.size(); ++c) {
            mu_[c] = params.mu(u_[c]);
            rho_[c] = params.rho(u_[c]);
        }
        assemble();
        lu_.factorize(jac_, "Stokes cell problem");
    }

    const MacLayout& layout() const { return layout_; }
    const UnitCellGrid& grid() const { return grid_; }
    int n_unknowns() const { return n_unknowns_; }

    /// Right-hand side Eu_bar e_axis (axis 0 = x, 1 = y).
    Vector pressure_forcing(int axis) const
    {
        if (axis < 0 || axis >= UnitCellGrid::dim()) throw ConfigError("axis index out of range");
        Vector b = Vector::Zero(n_unknowns_);
        const int offset = axis == 0 ? 0 : layout_.n_xfaces();
        const int count = axis == 0 ? layout_.n_xfaces() : layout_.n_yfaces();
        b.segment(offset, count).setConstant(params_.Eu_bar);
        return b;
    }

    /// Right-hand side c div(grad u (x) grad u).
    Vector capillary_forcing() const
    {
        AllenCahnOperator op;
        op.wall_slope = contact_cosine(params_.contact_angle) / params_.xi;
        std::vector<double> fx(static_cast<std::size_t>(layout_.n_xfaces()), 0.0);
        std::vector<double> fy(static_cast<std::size_t>(layout_.n_yfaces()), 0.0);
        add_capillary_divergence(layout_, op, u_, params_.surface_tension_coefficient(), fx, fy);
        Vector b = Vector::Zero(n_unknowns_);
        b.head(layout_.n_xfaces()) = Eigen::Map<const Vector>(fx.data(), layout_.n_xfaces());
        b.segment(layout_.n_xfaces(), layout_.n_yfaces()) = Eigen::Map<const Vector>(fy.data(), layout_.n_yfaces());
        return b;
    }

    CellSolution solve(const Vector& rhs, int driver) const
    {
        if (rhs.size() != n_unknowns_) throw ConfigError("right-hand side size mismatch");
        Vector x = lu_.solve(rhs, "Stokes cell problem");
        x += lu_.solve(rhs - jac_ * x, "Stokes cell problem");  // one refinement sweep

        CellSolution s;
        s.driver = driver;
        const int nxf = layout_.n_xfaces();
        const int nyf = layout_.n_yfaces();
        const int nc = layout_.n_cells();
        s.w.ux.assign(x.data(), x.data() + nxf);
        s.w.uy.assign(x.data() + nxf, x.data() + nxf + nyf);
        s.pi.assign(x.data() + nxf + nyf, x.data() + nxf + nyf + nc);
        double mean = 0.0;
        for (double v : s.pi) mean += v;
        mean /= nc;
        for (double& v : s.pi) v -= mean;

        const Vector r = jac_ * x - rhs;
        const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
        s.momentum_residual = r.head(nxf + nyf).lpNorm<Eigen::Infinity>() / scale;
        double mass = 0.0;
        for (double d : weighted_divergence(layout_, s.w, rho_)) mass = std::max(mass, std::abs(d));
        s.mass_residual = mass;
        if (!std::isfinite(s.momentum_residual) || !std::isfinite(mass))
            throw SolverError("Stokes cell problem: non-finite solution");
        return s;
    }

private:
    void assemble()
    {
        const int nxf = layout_.n_xfaces();
        const int nyf = layout_.n_yfaces();
        const int nc = layout_.n_cells();
        n_unknowns_ = nxf + nyf + nc + 1;
        const int gauge = n_unknowns_ - 1;

        using ad::SparseDual;
        std::vector<SparseDual> ux(static_cast<std::size_t>(nxf));
        std::vector<SparseDual> uy(static_cast<std::size_t>(nyf));
        std::vector<SparseDual> p(static_cast<std::size_t>(nc));
        for (int k = 0; k < nxf; ++k) ux[static_cast<std::size_t>(k)] = SparseDual::variable(0.0, k);
        for (int k = 0; k < nyf; ++k) uy[static_cast<std::size_t>(k)] = SparseDual::variable(0.0, nxf + k);
        for (int k = 0; k < nc; ++k) p[static_cast<std::size_t>(k)] = SparseDual::variable(0.0, nxf + nyf + k);
        const SparseDual lambda = SparseDual::variable(0.0, gauge);

        FlowOperator op;
        op.inv_re = 1.0 / params_.Re;
        op.euler = params_.Eu_bar;
        op.ghost_factor = FlowOperator::slip_ghost_factor(params_.slip_length, layout_.h());

        std::vector<SparseDual> rx(static_cast<std::size_t>(nxf));
        std::vector<SparseDual> ry(static_cast<std::size_t>(nyf));
        std::vector<SparseDual> rm(static_cast<std::size_t>(nc));
        add_stokes_operator(layout_, op, ux, uy, p, mu_, rx, ry);
        add_mass_flux(layout_, ux, uy, rho_, rm);

        std::vector<SparseDual> residual;
        residual.reserve(static_cast<std::size_t>(n_unknowns_));
        for (auto& r : rx) residual.push_back(std::move(r));
        for (auto& r : ry) residual.push_back(std::move(r));
        for (int c = 0; c < nc; ++c)
            residual.push_back(c == 0 ? rm[static_cast<std::size_t>(c)] + lambda : rm[static_cast<std::size_t>(c)]);
        residual.push_back(p.front());
        Vector value;
        assemble_jacobian(residual, n_unknowns_, jac_, value);
    }

    const UnitCellGrid& grid_;
    FluidParams params_;
    MacLayout layout_;
    std::vector<double> u_;
    std::vector<double> mu_;
    std::vector<double> rho_;
    int n_unknowns_ = 0;
    SparseMatrix jac_;
    SparseLuSolver lu_;
};

/// (w_j, Pi_j) for the pressure gradient along axis j (0 = x, 1 = y).
inline CellSolution solve_pressure_driven(const UnitCellGrid& grid, const PhaseField& u, const FluidParams& params,
                                          int axis)
{
    const CellProblem problem(grid, u, params);
    return problem.solve(problem.pressure_forcing(axis), axis + 1);
}

/// (w_0, Pi_0) driven by the capillary stress of u.
inline CellSolution solve_surface_tension(const UnitCellGrid& grid, const PhaseField& u, const FluidParams& params)
{
    const CellProblem problem(grid, u, params);
    return problem.solve(problem.capillary_forcing(), surface_tension_driver);
}

/// All d + 1 cell problems with a single factorization.
inline CellSolutions solve_all(const UnitCellGrid& grid, const PhaseField& u, const FluidParams& params)
{
    const CellProblem problem(grid, u, params);
    CellSolutions out;
    for (int axis = 0; axis < UnitCellGrid::dim(); ++axis)
        out.pressure.push_back(problem.solve(problem.pressure_forcing(axis), axis + 1));
    out.surface = problem.solve(problem.capillary_forcing(), surface_tension_driver);
    return out;
}

/// Velocity for a constant macroscopic pressure gradient plus the capillary
/// force, solved directly: L(v, q) = -Eu_bar g - c div(grad u (x) grad u).
inline CellSolution solve_combined(const UnitCellGrid& grid, const PhaseField& u, const FluidParams& params,
                                   const std::array<double, 2>& gradient)
{
    const CellProblem problem(grid, u, params);
    Vector rhs = -problem.capillary_forcing();
    for (int axis = 0; axis < 2; ++axis) rhs -= gradient[static_cast<std::size_t>(axis)] * problem.pressure_forcing(axis);
    return problem.solve(rhs, -1);
}

}  // namespace porehom
