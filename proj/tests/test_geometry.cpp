#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "porehom/geometry.hpp"
#include "porehom/mac_layout.hpp"

using namespace porehom;

namespace {

// Brute-force oracle: a cell is solid iff its center lies in the snapped band.
int count_fluid(int n, auto&& solid_at_center)
{
    int fluid = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (!solid_at_center((i + 0.5) / n, (j + 0.5) / n)) ++fluid;
    return fluid;
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("porehom_test_" + name);
}

}  // namespace

TEST(Geometry, ObstaclePorosityIsExactAtCompatibleResolutions)
{
    for (int n : {20, 40, 80, 160}) EXPECT_DOUBLE_EQ(porosity(build_unit_cell(shape::Obstacle{0.45}, n)), 0.7975);
}

TEST(Geometry, CrossPorosityIsExactAtCompatibleResolutions)
{
    for (int n : {10, 20, 80, 130}) EXPECT_DOUBLE_EQ(porosity(build_unit_cell(shape::Cross{0.3}, n)), 0.51);
}

TEST(Geometry, EmptyAndChannel)
{
    const auto empty = build_unit_cell(shape::Empty{}, 16);
    EXPECT_DOUBLE_EQ(porosity(empty), 1.0);
    EXPECT_FALSE(empty.has_solid());
    const int n = 64;
    const auto channel = build_unit_cell(shape::Channel{0.5}, n);
    const int oracle = count_fluid(n, [](double, double y) { return !(y > 0.25 && y < 0.75); });
    EXPECT_EQ(channel.fluid_cells(), oracle);
    EXPECT_DOUBLE_EQ(porosity(channel), 0.5);
}

TEST(Geometry, AnalyticPorosity)
{
    EXPECT_DOUBLE_EQ(analytic_porosity(shape::Obstacle{0.45}), 1.0 - 0.45 * 0.45);
    EXPECT_DOUBLE_EQ(analytic_porosity(shape::Empty{}), 1.0);
    EXPECT_DOUBLE_EQ(analytic_porosity(shape::Channel{0.5}), 0.5);
    EXPECT_NEAR(analytic_porosity(shape::Cross{0.3}), 0.51, 1e-15);
}

TEST(Geometry, PorosityConvergesAtFirstOrder)
{
    // Incompatible resolutions: the snapped side differs by at most half a cell.
    const double side = 0.437;
    const double exact = analytic_porosity(shape::Obstacle{side});
    for (int n : {17, 33, 61, 127, 251}) {
        const double err = std::abs(porosity(build_unit_cell(shape::Obstacle{side}, n)) - exact);
        EXPECT_LE(err, 1.0 / n) << "n = " << n;
    }
}

TEST(Geometry, MasksHaveTheSquareSymmetry)
{
    for (const GeometryKind kind : {GeometryKind{shape::Obstacle{0.45}}, GeometryKind{shape::Cross{0.3}}}) {
        const auto g = build_unit_cell(kind, 40);
        const int n = g.n();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                EXPECT_EQ(g.solid(i, j), g.solid(j, i));            // diagonal reflection
                EXPECT_EQ(g.solid(i, j), g.solid(n - 1 - i, j));    // x reflection
                EXPECT_EQ(g.solid(i, j), g.solid(i, n - 1 - j));    // y reflection
            }
    }
}

TEST(Geometry, PeriodicWrapIsTheIdentity)
{
    const auto g = build_unit_cell(shape::Cross{0.3}, 20);
    for (int j = 0; j < 20; ++j)
        for (int i = 0; i < 20; ++i) {
            EXPECT_EQ(g.solid(i, j), g.solid(i + 20, j));
            EXPECT_EQ(g.solid(i, j), g.solid(i, j - 20));
            EXPECT_EQ(g.solid(i, j), g.solid(i - 40, j + 60));
        }
}

TEST(Geometry, PoreSpaceIsConnected)
{
    EXPECT_EQ(build_unit_cell(shape::Obstacle{0.45}, 40).fluid_components(), 1);
    EXPECT_EQ(build_unit_cell(shape::Cross{0.3}, 40).fluid_components(), 1);
    EXPECT_EQ(build_unit_cell(shape::Channel{0.5}, 40).fluid_components(), 1);
}

TEST(Geometry, RejectsUnresolvableParameters)
{
    EXPECT_THROW(build_unit_cell(shape::Obstacle{0.45}, 4), ConfigError);
    EXPECT_THROW(build_unit_cell(shape::Obstacle{1.2}, 40), ConfigError);
    EXPECT_THROW(build_unit_cell(shape::Cross{0.01}, 20), ConfigError);
    EXPECT_THROW(build_unit_cell(shape::Channel{0.99}, 20), ConfigError);
}

TEST(Geometry, IsolatedFluidCellIsRejected)
{
    std::vector<std::uint8_t> mask(64, 1);
    mask[3 * 8 + 3] = 0;
    mask[0] = 0;
    mask[1] = 0;
    EXPECT_THROW(UnitCellGrid(8, mask), ConfigError);
}

TEST(Geometry, MaskFileRoundTrip)
{
    const auto path = temp_file("mask_roundtrip.txt");
    const auto original = build_unit_cell(shape::Obstacle{0.45}, 20);
    write_mask_file(original, path.string());
    const auto loaded = build_unit_cell(shape::MaskFile{path.string()}, 0);
    EXPECT_EQ(loaded.solid_mask(), original.solid_mask());
    EXPECT_THROW(build_unit_cell(shape::MaskFile{path.string()}, 40), ConfigError);
    std::filesystem::remove(path);
}

TEST(Geometry, MalformedMaskFiles)
{
    const auto path = temp_file("mask_bad.txt");
    auto write = [&](const std::string& text) {
        std::ofstream(path) << text;
        return shape::MaskFile{path.string()};
    };
    EXPECT_THROW(build_unit_cell(write(""), 0), ConfigError);
    EXPECT_THROW(build_unit_cell(write("8 4\n"), 0), ConfigError);
    EXPECT_THROW(build_unit_cell(write("8 8\n0000x000\n"), 0), ConfigError);
    EXPECT_THROW(build_unit_cell(write("8 8\n00000000\n"), 0), ConfigError);
    EXPECT_THROW(build_unit_cell(shape::MaskFile{"/nonexistent/mask.txt"}, 0), ConfigError);
    std::filesystem::remove(path);
}

TEST(MacLayout, FaceCountsOnAnObstacle)
{
    const auto g = build_unit_cell(shape::Obstacle{0.5}, 8);
    const MacLayout layout(g);
    EXPECT_EQ(layout.n_cells(), 48);
    // Each of the 8 rows has 8 x-faces; rows through the obstacle lose the 5
    // faces touching it (4 solid cells, 5 faces with at least one solid side).
    EXPECT_EQ(layout.n_xfaces(), 4 * 8 + 4 * 3);
    EXPECT_EQ(layout.n_yfaces(), layout.n_xfaces());
    for (const auto& [i, j] : layout.cells()) EXPECT_TRUE(g.fluid(i, j));
}
