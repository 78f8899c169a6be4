#pragma once

// Effective two-phase parameters from cell solutions: phase-weighted mobility
// tensors, surface-tension vectors, absolute and relative permeabilities and
// the Darcy-type velocity map v_k = -K_k grad p - M_k.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "porehom/errors.hpp"
#include "porehom/fluid.hpp"
#include "porehom/geometry.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/stokescell.hpp"
#include "porehom/streamflow.hpp"

namespace porehom {

using Vec2 = std::array<double, 2>;
using Tensor2 = std::array<Vec2, 2>;  // [row i][column j]

struct EffectiveParameters {
    Tensor2 K1{};
    Tensor2 K2{};
    Vec2 M1{};
    Vec2 M2{};
    double s1 = 0.0;
    double area = 0.0;
    double porosity = 0.0;
    bool filtered = false;
};

namespace detail {

inline void require_matching(const MacLayout& layout, const PhaseField& u, const CellVelocity& w)
{
    if (u.values.size() != static_cast<std::size_t>(layout.n_cells()))
        throw ConfigError("phase field does not match the grid");
    if (w.ux.size() != static_cast<std::size_t>(layout.n_xfaces()) ||
        w.uy.size() != static_cast<std::size_t>(layout.n_yfaces()))
        throw ConfigError("cell solution does not match the grid");
}

// Pore-space means of (u w, (1 - u) w) with w interpolated to cell centers,
// optionally restricted to marked cells (the divisor stays |P|).
inline std::array<Vec2, 2> weighted_means(const MacLayout& layout, const PhaseField& u, const CellVelocity& w,
                                          const std::vector<std::uint8_t>* marked)
{
    require_matching(layout, u, w);
    std::array<Vec2, 2> sums{};
    for (int c = 0; c < layout.n_cells(); ++c) {
        if (marked != nullptr && !(*marked)[static_cast<std::size_t>(c)]) continue;
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        const auto [vx, vy] = w.at_center(layout, i, j);
        // Volume fractions; the uniform conservation shift leaves small overshoots in the far field.
        const double a = std::clamp(u.values[static_cast<std::size_t>(c)], 0.0, 1.0);
        sums[0][0] += a * vx;
        sums[0][1] += a * vy;
        sums[1][0] += (1.0 - a) * vx;
        sums[1][1] += (1.0 - a) * vy;
    }
    for (auto& s : sums)
        for (double& x : s) x /= layout.n_cells();
    return sums;
}

}  // namespace detail

/// K_k[i][j] = |P|^-1 sum u_k (w_j)_i h^2 over (marked) fluid cells, with
/// u_1 = clamp(u, 0, 1) and u_2 = 1 - u_1. `masks`, when given, holds one mask per axis j.
inline std::pair<Tensor2, Tensor2> mobility_tensors(const UnitCellGrid& grid, const PhaseField& u,
                                                    const std::vector<CellSolution>& solutions,
                                                    const std::vector<NetFlowMask>* masks = nullptr)
{
    if (solutions.size() != 2) throw ConfigError("mobility tensors need one pressure-driven solution per axis");
    if (masks != nullptr && masks->size() != 2) throw ConfigError("mobility tensors need one mask per axis");
    const MacLayout layout(grid);
    Tensor2 k1{};
    Tensor2 k2{};
    for (int j = 0; j < 2; ++j) {
        const auto* marked = masks != nullptr ? &(*masks)[static_cast<std::size_t>(j)].marked : nullptr;
        if (marked != nullptr && marked->size() != static_cast<std::size_t>(layout.n_cells()))
            throw ConfigError("net-flow mask does not match the grid");
        const auto m = detail::weighted_means(layout, u, solutions[static_cast<std::size_t>(j)].w, marked);
        for (int i = 0; i < 2; ++i) {
            k1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m[0][static_cast<std::size_t>(i)];
            k2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m[1][static_cast<std::size_t>(i)];
        }
    }
    return {k1, k2};
}

/// M_k = |P|^-1 sum u_k w_0 h^2 (never filtered).
inline std::pair<Vec2, Vec2> surface_tension_vectors(const UnitCellGrid& grid, const PhaseField& u,
                                                     const CellSolution& w0)
{
    const MacLayout layout(grid);
    const auto m = detail::weighted_means(layout, u, w0.w, nullptr);
    return {m[0], m[1]};
}

/// Single-phase mobility tensor (u = 0, M = R = 1). With `filter`, each column
/// is restricted to its own net-flow mask.
inline Tensor2 absolute_permeability(const UnitCellGrid& grid, const FluidParams& params, bool filter = false)
{
    FluidParams single = params;
    single.M = 1.0;
    single.R = 1.0;
    const PhaseField zero = PhaseField::constant(grid, 0.0, single.xi);
    const CellProblem problem(grid, zero, single);
    std::vector<CellSolution> sols;
    for (int axis = 0; axis < 2; ++axis) sols.push_back(problem.solve(problem.pressure_forcing(axis), axis + 1));
    std::vector<NetFlowMask> masks;
    if (filter)
        for (int axis = 0; axis < 2; ++axis)
            masks.push_back(net_flow_mask(grid, sols[static_cast<std::size_t>(axis)].w, axis));
    return mobility_tensors(grid, zero, sols, filter ? &masks : nullptr).second;
}

/// Scalar value of an isotropic tensor: equal diagonal entries and negligible
/// off-diagonal entries, both within `tolerance` relative to the mean diagonal.
inline std::optional<double> isotropic_value(const Tensor2& k, double tolerance = 0.01)
{
    const double mean = 0.5 * (k[0][0] + k[1][1]);
    if (!(mean > 0.0)) return std::nullopt;
    if (std::abs(k[0][0] - k[1][1]) > tolerance * mean) return std::nullopt;
    if (std::abs(k[0][1]) > tolerance * mean || std::abs(k[1][0]) > tolerance * mean) return std::nullopt;
    return mean;
}

/// K_rel = mu_k K_k / kappa_abs.
inline Tensor2 relative_permeability(const Tensor2& k, double kappa_abs, double mu_k)
{
    if (!(kappa_abs > 0.0)) throw ConfigError("absolute permeability must be positive");
    Tensor2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                mu_k * k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / kappa_abs;
    return r;
}

/// Tensor overload: refuses anisotropic absolute permeabilities.
inline Tensor2 relative_permeability(const Tensor2& k, const Tensor2& kappa_abs, double mu_k)
{
    const auto iso = isotropic_value(kappa_abs);
    if (!iso) {
        std::ostringstream os;
        os << "absolute permeability is anisotropic (kxx = " << kappa_abs[0][0] << ", kyy = " << kappa_abs[1][1]
           << ", kxy = " << kappa_abs[0][1] << "); relative permeabilities are undefined";
        throw ConfigError(os.str());
    }
    return relative_permeability(k, *iso, mu_k);
}

/// v = -K grad_p - M.
inline Vec2 darcy_velocity(const Tensor2& k, const Vec2& m, const Vec2& grad_p)
{
    return {-(k[0][0] * grad_p[0] + k[0][1] * grad_p[1]) - m[0], -(k[1][0] * grad_p[0] + k[1][1] * grad_p[1]) - m[1]};
}

struct RelPermRecord {
    double s1 = 0.0;
    Tensor2 Krel1{};
    Tensor2 Krel2{};
    Vec2 M1{};
    Vec2 M2{};
    double area = 0.0;
    double phi = 0.0;
    std::string geometry;
    double M = 1.0;
    double R = 1.0;
    std::string droplet;  // e.g. "center=(0,0) r=0.2"
    bool filtered = false;
};

inline RelPermRecord make_record(const EffectiveParameters& eff, double kappa_abs, const FluidParams& params,
                                 std::string geometry, std::string droplet)
{
    RelPermRecord r;
    r.s1 = eff.s1;
    r.Krel1 = relative_permeability(eff.K1, kappa_abs, params.M);
    r.Krel2 = relative_permeability(eff.K2, kappa_abs, 1.0);
    r.M1 = eff.M1;
    r.M2 = eff.M2;
    r.area = eff.area;
    r.phi = eff.porosity;
    r.geometry = std::move(geometry);
    r.M = params.M;
    r.R = params.R;
    r.droplet = std::move(droplet);
    r.filtered = eff.filtered;
    return r;
}

inline const char* relperm_csv_header()
{
    return "s1,Krel1_xx,Krel1_yy,Krel2_xx,Krel2_yy,M1_x,M1_y,M2_x,M2_y,area,phi,geometry,M,R";
}

inline void write_relperm_csv(std::ostream& out, const std::vector<RelPermRecord>& records)
{
    out << relperm_csv_header() << '\n';
    out << std::setprecision(12);
    for (const auto& r : records) {
        std::string geometry = r.geometry;
        if (geometry.find(',') != std::string::npos) geometry = '"' + geometry + '"';
        out << r.s1 << ',' << r.Krel1[0][0] << ',' << r.Krel1[1][1] << ',' << r.Krel2[0][0] << ',' << r.Krel2[1][1]
            << ',' << r.M1[0] << ',' << r.M1[1] << ',' << r.M2[0] << ',' << r.M2[1] << ',' << r.area << ',' << r.phi
            << ',' << geometry << ',' << r.M << ',' << r.R << '\n';
    }
}

}  // namespace porehom
