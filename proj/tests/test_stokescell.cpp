#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "porehom/effective.hpp"
#include "porehom/geometry.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/stokescell.hpp"

using namespace porehom;

namespace {

double mean_x_velocity(const UnitCellGrid& grid, const CellSolution& s)
{
    const MacLayout layout(grid);
    double sum = 0.0;
    for (const auto& [i, j] : layout.cells()) sum += s.w.at_center(layout, i, j).first;
    return sum / layout.n_cells();
}

double max_difference(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

// L-shaped solid: no reflection symmetry, so the permeability tensor is full.
UnitCellGrid l_shaped(int n)
{
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n * n), 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const bool leg = i >= n / 5 && i < n / 2 && j >= n / 5 && j < 3 * n / 5;
            const bool foot = i >= n / 5 && i < 4 * n / 5 && j >= n / 5 && j < 2 * n / 5;
            mask[static_cast<std::size_t>(j * n + i)] = leg || foot ? 1 : 0;
        }
    return UnitCellGrid(n, mask, "l-shape");
}

}  // namespace

TEST(StokesCell, ChannelPoiseuilleMeanVelocity)
{
    FluidParams params;
    params.Eu_bar = 2.0;
    params.Re = 3.0;
    const double height = 0.5;
    double previous_error = 1.0;
    for (int n : {16, 32, 64}) {
        const auto grid = build_unit_cell(shape::Channel{height}, n);
        const auto sol = solve_pressure_driven(grid, PhaseField::constant(grid, 0.0, params.xi), params, 0);
        const double exact = params.Eu_bar * params.Re * height * height / 12.0;
        const double error = std::abs(mean_x_velocity(grid, sol) - exact) / exact;
        EXPECT_LT(error, 0.3 * previous_error + 1e-12) << "n = " << n;  // second order
        previous_error = error;
    }
    EXPECT_LT(previous_error, 0.02);
}

TEST(StokesCell, PoiseuilleProfileAtCellCenters)
{
    const int n = 64;
    const auto grid = build_unit_cell(shape::Channel{0.5}, n);
    const FluidParams params;
    const auto sol = solve_pressure_driven(grid, PhaseField::constant(grid, 0.0, params.xi), params, 0);
    const MacLayout layout(grid);
    for (const auto& [i, j] : layout.cells()) {
        const double y = (j + 0.5) / n - 0.25;
        const double exact = 0.5 * y * (0.5 - y);
        EXPECT_NEAR(sol.w.at_center(layout, i, j).first, exact, 2e-3 * 0.5 * 0.25 * 0.25);
        EXPECT_NEAR(sol.w.at_center(layout, i, j).second, 0.0, 1e-12);
    }
}

TEST(StokesCell, MassAndGaugeResiduals)
{
    const auto grid = build_unit_cell(shape::Obstacle{0.45}, 40);
    FluidParams params;
    params.M = 3.0;
    params.R = 5.0;
    params.xi = 0.1;
    const auto u = initial_droplet(grid, {0.2, 0.1}, 0.3, params.xi);
    const auto all = solve_all(grid, u, params);
    std::vector<CellSolution> sols = all.pressure;
    sols.push_back(all.surface);
    for (const auto& s : sols) {
        EXPECT_LE(s.mass_residual, 1e-9);
        EXPECT_LE(s.momentum_residual, 1e-10);
        double mean = 0.0;
        for (double p : s.pi) mean += p;
        EXPECT_LE(std::abs(mean / static_cast<double>(s.pi.size())), 1e-12);
    }
    EXPECT_EQ(all.pressure[0].driver, 1);
    EXPECT_EQ(all.pressure[1].driver, 2);
    EXPECT_EQ(all.surface.driver, surface_tension_driver);
}

TEST(StokesCell, ObstacleSolutionsAreRelatedByTheDiagonalReflection)
{
    const int n = 40;
    const auto grid = build_unit_cell(shape::Obstacle{0.45}, n);
    const FluidParams params;
    const auto zero = PhaseField::constant(grid, 0.0, params.xi);
    const auto sx = solve_pressure_driven(grid, zero, params, 0);
    const auto sy = solve_pressure_driven(grid, zero, params, 1);
    const MacLayout layout(grid);
    for (const auto& [i, j] : layout.cells()) {
        const auto [ax, ay] = sx.w.at_center(layout, i, j);
        const auto [bx, by] = sy.w.at_center(layout, j, i);
        EXPECT_NEAR(ax, by, 1e-12);
        EXPECT_NEAR(ay, bx, 1e-12);
    }
}

TEST(StokesCell, PhaseFieldIsInertForUnitRatiosAndPureFluid2)
{
    const auto grid = build_unit_cell(shape::Cross{0.3}, 40);
    FluidParams single;
    FluidParams ratios = single;
    ratios.M = 4.0;
    ratios.R = 7.0;
    const auto zero = PhaseField::constant(grid, 0.0, single.xi);
    const auto a = solve_pressure_driven(grid, zero, single, 0);
    const auto b = solve_pressure_driven(grid, zero, ratios, 0);
    EXPECT_LE(max_difference(a.w.ux, b.w.ux), 1e-13);
    EXPECT_LE(max_difference(a.w.uy, b.w.uy), 1e-13);
}

TEST(StokesCell, VelocityScalesWithTheForcing)
{
    const auto grid = build_unit_cell(shape::Obstacle{0.45}, 32);
    FluidParams base;
    FluidParams doubled = base;
    doubled.Eu_bar *= 2.0;
    const auto zero = PhaseField::constant(grid, 0.0, base.xi);
    const auto a = solve_pressure_driven(grid, zero, base, 0);
    const auto b = solve_pressure_driven(grid, zero, doubled, 0);
    for (std::size_t k = 0; k < a.w.ux.size(); ++k) EXPECT_NEAR(b.w.ux[k], 2.0 * a.w.ux[k], 1e-13);
    FluidParams faster = base;
    faster.Re *= 2.0;
    const auto c = solve_pressure_driven(grid, zero, faster, 0);
    for (std::size_t k = 0; k < a.w.ux.size(); ++k) EXPECT_NEAR(c.w.ux[k], 2.0 * a.w.ux[k], 1e-13);
}

TEST(StokesCell, SinglePhasePermeabilityIsSymmetricPositiveDefinite)
{
    const auto grid = l_shaped(40);
    const Tensor2 k = absolute_permeability(grid, FluidParams{});
    EXPECT_NEAR(k[0][1], k[1][0], 1e-8);
    EXPECT_GT(std::abs(k[0][1]), 1e-6);  // not trivially diagonal
    EXPECT_GT(k[0][0], 0.0);
    EXPECT_GT(k[0][0] * k[1][1] - k[0][1] * k[1][0], 0.0);
}

TEST(StokesCell, ConstantPhaseFieldHasNoCapillaryFlow)
{
    const auto grid = build_unit_cell(shape::Obstacle{0.45}, 32);
    FluidParams params;
    params.contact_angle = M_PI / 3.0;
    for (double value : {0.0, 1.0}) {
        const auto s = solve_surface_tension(grid, PhaseField::constant(grid, value, params.xi), params);
        EXPECT_EQ(s.w.max_abs(), 0.0);
        for (double p : s.pi) EXPECT_EQ(p, 0.0);
    }
}

TEST(StokesCell, SuperpositionOfTheCellSolutions)
{
    const auto grid = build_unit_cell(shape::Obstacle{0.45}, 32);
    FluidParams params;
    params.M = 2.0;
    params.R = 3.0;
    params.xi = 0.1;
    const auto u = initial_droplet(grid, {0.3, 0.2}, 0.3, params.xi);
    const auto all = solve_all(grid, u, params);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 3; ++trial) {
        const std::array<double, 2> g{dist(rng), dist(rng)};
        const auto direct = solve_combined(grid, u, params, g);
        for (std::size_t k = 0; k < direct.w.ux.size(); ++k) {
            const double sum = -g[0] * all.pressure[0].w.ux[k] - g[1] * all.pressure[1].w.ux[k] - all.surface.w.ux[k];
            EXPECT_NEAR(direct.w.ux[k], sum, 1e-10);
        }
        for (std::size_t k = 0; k < direct.w.uy.size(); ++k) {
            const double sum = -g[0] * all.pressure[0].w.uy[k] - g[1] * all.pressure[1].w.uy[k] - all.surface.w.uy[k];
            EXPECT_NEAR(direct.w.uy[k], sum, 1e-10);
        }
    }
}

TEST(StokesCell, SlipIncreasesThePermeability)
{
    const auto grid = build_unit_cell(shape::Channel{0.5}, 32);
    FluidParams no_slip;
    FluidParams slip = no_slip;
    slip.slip_length = 0.05;
    const auto zero = PhaseField::constant(grid, 0.0, no_slip.xi);
    const double a = mean_x_velocity(grid, solve_pressure_driven(grid, zero, no_slip, 0));
    const double b = mean_x_velocity(grid, solve_pressure_driven(grid, zero, slip, 0));
    // Navier slip on both walls: mean = H^2/12 + lambda H/2.
    EXPECT_NEAR(b - a, 0.05 * 0.5 / 2.0, 0.1 * 0.05 * 0.5 / 2.0);
}

TEST(StokesCell, SingularConfigurationsAreRejected)
{
    const FluidParams params;
    const auto empty = build_unit_cell(shape::Empty{}, 16);
    EXPECT_THROW(solve_pressure_driven(empty, PhaseField::constant(empty, 0.0, params.xi), params, 0), SolverError);

    // Two disconnected horizontal channels.
    std::vector<std::uint8_t> mask(256, 1);
    for (int i = 0; i < 16; ++i)
        for (int j : {2, 3, 10, 11}) mask[static_cast<std::size_t>(j * 16 + i)] = 0;
    const UnitCellGrid split(16, mask);
    EXPECT_THROW(solve_pressure_driven(split, PhaseField::constant(split, 0.0, params.xi), params, 0), SolverError);

    const auto grid = build_unit_cell(shape::Obstacle{0.45}, 20);
    EXPECT_THROW(solve_pressure_driven(grid, PhaseField::constant(grid, 0.0, 0.2), params, 0), ConfigError);
    EXPECT_THROW(solve_pressure_driven(grid, PhaseField::constant(grid, 0.0, params.xi), params, 2), ConfigError);
}
