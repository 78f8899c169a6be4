#pragma once

// Periodic unit-cell geometries on a uniform Cartesian grid over Y = [0,1]^2.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "porehom/errors.hpp"

namespace porehom {

namespace shape {

/// Square solid of the given side length centered in Y.
struct Obstacle {
    double side;
};
/// Two perpendicular fluid channels of the given width crossing at the center of Y.
struct Cross {
    double width;
};
/// Horizontal fluid channel of the given height centered in Y, solid above and below.
struct Channel {
    double height;
};
/// Mask read from a plain-text 0/1 file (1 = solid).
struct MaskFile {
    std::string path;
};
struct Empty {};

}  // namespace shape

using GeometryKind = std::variant<shape::Obstacle, shape::Cross, shape::Channel, shape::MaskFile, shape::Empty>;

/// Periodic unit cell with a cell-wise solid mask. Immutable after construction.
class UnitCellGrid {
public:
    UnitCellGrid(int n, std::vector<std::uint8_t> solid_mask, std::string id = "custom")
        : n_(n), solid_(std::move(solid_mask)), id_(std::move(id))
    {
        if (n_ < 8) throw ConfigError("unit cell resolution must be at least 8, got " + std::to_string(n_));
        if (solid_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
            throw ConfigError("solid mask size does not match resolution");
        for (auto s : solid_)
            if (!s) ++fluid_cells_;
        if (fluid_cells_ == 0) throw ConfigError("unit cell has no fluid cells");
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) {
                if (solid(i, j)) continue;
                if (solid(i + 1, j) && solid(i - 1, j) && solid(i, j + 1) && solid(i, j - 1) && fluid_cells_ > 1)
                    throw ConfigError("isolated fluid cell at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
    }

    static constexpr int dim() { return 2; }
    int n() const { return n_; }
    double h() const { return 1.0 / n_; }
    double cell_volume() const { return h() * h(); }
    const std::string& id() const { return id_; }

    int wrap(int i) const { return ((i % n_) + n_) % n_; }
    int index(int i, int j) const { return wrap(j) * n_ + wrap(i); }
    bool solid(int i, int j) const { return solid_[static_cast<std::size_t>(index(i, j))] != 0; }
    bool fluid(int i, int j) const { return !solid(i, j); }

    const std::vector<std::uint8_t>& solid_mask() const { return solid_; }
    int fluid_cells() const { return fluid_cells_; }
    bool has_solid() const { return fluid_cells_ < n_ * n_; }

    /// |P|, the measure of the pore space (equals the porosity since |Y| = 1).
    double pore_volume() const { return fluid_cells_ * cell_volume(); }

    /// Number of 4-connected components of the pore space, with periodic wrap.
    int fluid_components() const
    {
        std::vector<int> label(solid_.size(), -1);
        int components = 0;
        std::vector<int> stack;
        for (int start = 0; start < n_ * n_; ++start) {
            if (solid_[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)] >= 0) continue;
            stack.push_back(start);
            label[static_cast<std::size_t>(start)] = components;
            while (!stack.empty()) {
                const int c = stack.back();
                stack.pop_back();
                const int i = c % n_;
                const int j = c / n_;
                const int nb[4] = {index(i + 1, j), index(i - 1, j), index(i, j + 1), index(i, j - 1)};
                for (int k : nb) {
                    if (solid_[static_cast<std::size_t>(k)] || label[static_cast<std::size_t>(k)] >= 0) continue;
                    label[static_cast<std::size_t>(k)] = components;
                    stack.push_back(k);
                }
            }
            ++components;
        }
        return components;
    }

private:
    int n_;
    std::vector<std::uint8_t> solid_;
    std::string id_;
    int fluid_cells_ = 0;
};

/// Fluid-cell fraction of the unit cell.
inline double porosity(const UnitCellGrid& grid)
{
    return static_cast<double>(grid.fluid_cells()) / (static_cast<double>(grid.n()) * grid.n());
}

/// Continuum area fraction of the pore space for a geometry kind.
inline double analytic_porosity(const GeometryKind& kind)
{
    struct Visitor {
        double operator()(const shape::Obstacle& o) const { return 1.0 - o.side * o.side; }
        double operator()(const shape::Cross& c) const { return 1.0 - (1.0 - c.width) * (1.0 - c.width); }
        double operator()(const shape::Channel& c) const { return c.height; }
        double operator()(const shape::MaskFile&) const { return std::nan(""); }
        double operator()(const shape::Empty&) const { return 1.0; }
    };
    return std::visit(Visitor{}, kind);
}

inline std::string geometry_id(const GeometryKind& kind)
{
    struct Visitor {
        static std::string num(double x)
        {
            std::ostringstream os;
            os << x;
            return os.str();
        }
        std::string operator()(const shape::Obstacle& o) const { return "obstacle(" + num(o.side) + ")"; }
        std::string operator()(const shape::Cross& c) const { return "cross(" + num(c.width) + ")"; }
        std::string operator()(const shape::Channel& c) const { return "channel(" + num(c.height) + ")"; }
        std::string operator()(const shape::MaskFile& m) const { return "mask(" + m.path + ")"; }
        std::string operator()(const shape::Empty&) const { return "empty"; }
    };
    return std::visit(Visitor{}, kind);
}

namespace detail {

// Number of cells a centered band of the given extent snaps to, and its first index.
struct Band {
    int cells;
    int start;
};

inline Band snap_band(double extent, int n, const char* what)
{
    if (!(extent > 0.0 && extent < 1.0))
        throw ConfigError(std::string(what) + " must lie in (0, 1)");
    const int cells = static_cast<int>(std::lround(extent * n));
    return {cells, (n - cells) / 2};
}

inline void require_resolved(int cells, const char* what)
{
    if (cells < 2)
        throw ConfigError(std::string("resolution too coarse: ") + what + " is narrower than 2 cells");
}

inline UnitCellGrid read_mask_file(const std::string& path, int n_requested)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mask file '" + path + "'");
    int nx = 0;
    int ny = 0;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("mask file '" + path + "' is empty");
    {
        std::istringstream head(line);
        if (!(head >> nx >> ny)) throw ConfigError("mask file '" + path + "': first line must be \"n_x n_y\"");
    }
    if (nx != ny) throw ConfigError("mask file '" + path + "': unit cells must be square (n_x == n_y)");
    if (n_requested > 0 && n_requested != nx)
        throw ConfigError("mask file '" + path + "' has dimensions " + std::to_string(nx) + "x" +
                          std::to_string(ny) + " but resolution " + std::to_string(n_requested) + " was requested");
    std::vector<std::uint8_t> solid;
    solid.reserve(static_cast<std::size_t>(nx) * ny);
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::uint8_t> row;
        for (char c : line) {
            if (c == '0' || c == '1')
                row.push_back(c == '1' ? 1 : 0);
            else if (!std::isspace(static_cast<unsigned char>(c)))
                throw ConfigError("mask file '" + path + "': unexpected character '" + std::string(1, c) + "'");
        }
        if (row.empty()) continue;
        if (static_cast<int>(row.size()) != nx)
            throw ConfigError("mask file '" + path + "': row " + std::to_string(rows) + " has " +
                              std::to_string(row.size()) + " entries, expected " + std::to_string(nx));
        solid.insert(solid.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows != ny)
        throw ConfigError("mask file '" + path + "': expected " + std::to_string(ny) + " rows, found " +
                          std::to_string(rows));
    return UnitCellGrid(nx, std::move(solid), "mask(" + path + ")");
}

}  // namespace detail

/// Rasterizes a geometry on an n x n grid. Band widths snap to whole cells and
/// are centered, so the porosities of the reference geometries are exact at
/// compatible resolutions. For MaskFile, n = 0 takes the size from the file.
inline UnitCellGrid build_unit_cell(const GeometryKind& kind, int n)
{
    if (std::holds_alternative<shape::MaskFile>(kind))
        return detail::read_mask_file(std::get<shape::MaskFile>(kind).path, n);
    if (n < 8) throw ConfigError("unit cell resolution must be at least 8, got " + std::to_string(n));

    std::vector<std::uint8_t> solid(static_cast<std::size_t>(n) * n, 0);
    auto set = [&](auto&& pred) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) solid[static_cast<std::size_t>(j * n + i)] = pred(i, j) ? 1 : 0;
    };
    auto in_band = [](int k, const detail::Band& b) { return k >= b.start && k < b.start + b.cells; };

    if (const auto* o = std::get_if<shape::Obstacle>(&kind)) {
        const auto band = detail::snap_band(o->side, n, "obstacle side");
        detail::require_resolved(band.cells, "obstacle");
        detail::require_resolved(n - band.cells, "gap between obstacles");
        set([&](int i, int j) { return in_band(i, band) && in_band(j, band); });
    } else if (const auto* c = std::get_if<shape::Cross>(&kind)) {
        const auto band = detail::snap_band(c->width, n, "cross channel width");
        detail::require_resolved(band.cells, "cross channel");
        detail::require_resolved(n - band.cells, "solid block between channels");
        set([&](int i, int j) { return !in_band(i, band) && !in_band(j, band); });
    } else if (const auto* ch = std::get_if<shape::Channel>(&kind)) {
        const auto band = detail::snap_band(ch->height, n, "channel height");
        detail::require_resolved(band.cells, "channel");
        detail::require_resolved(n - band.cells, "channel wall");
        set([&](int, int j) { return !in_band(j, band); });
    }
    return UnitCellGrid(n, std::move(solid), geometry_id(kind));
}

/// Writes a mask in the MaskFile format (first data row is j = 0).
inline void write_mask_file(const UnitCellGrid& grid, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write mask file '" + path + "'");
    out << grid.n() << ' ' << grid.n() << '\n';
    for (int j = 0; j < grid.n(); ++j) {
        for (int i = 0; i < grid.n(); ++i) out << (grid.solid(i, j) ? '1' : '0');
        out << '\n';
    }
}

}  // namespace porehom
