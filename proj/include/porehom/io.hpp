#pragma once

// Field output: legacy-VTK structured points (cell data) and CSV point lists.

#include <array>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "porehom/errors.hpp"
#include "porehom/mac_layout.hpp"
#include "porehom/staggered_fields.hpp"

namespace porehom::io {

/// Uniform image with cell-centered scalar and vector arrays, written as
/// ASCII legacy VTK (STRUCTURED_POINTS with CELL_DATA).
class VtkImage {
public:
    VtkImage(int nx, int ny, double h) : nx_(nx), ny_(ny), h_(h)
    {
        if (nx <= 0 || ny <= 0 || !(h > 0.0)) throw ConfigError("VTK image needs positive dimensions");
    }

    void add_scalar(std::string name, std::vector<double> values)
    {
        if (values.size() != size()) throw ConfigError("VTK scalar '" + name + "' has the wrong size");
        scalars_.push_back({std::move(name), std::move(values)});
    }

    void add_vector(std::string name, std::vector<std::array<double, 2>> values)
    {
        if (values.size() != size()) throw ConfigError("VTK vector '" + name + "' has the wrong size");
        vectors_.push_back({std::move(name), std::move(values)});
    }

    void write(std::ostream& out, const std::string& title = "porehom") const
    {
        out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
        out << "DIMENSIONS " << nx_ + 1 << ' ' << ny_ + 1 << " 1\n";
        out << "ORIGIN 0 0 0\nSPACING " << h_ << ' ' << h_ << " 1\n";
        out << "CELL_DATA " << size() << '\n';
        out.precision(12);
        for (const auto& s : scalars_) {
            out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : s.values) out << v << '\n';
        }
        for (const auto& v : vectors_) {
            out << "VECTORS " << v.name << " double\n";
            for (const auto& a : v.values) out << a[0] << ' ' << a[1] << " 0\n";
        }
    }

    void write(const std::string& path, const std::string& title = "porehom") const
    {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot open '" + path + "' for writing");
        write(out, title);
    }

private:
    std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

    struct Scalar {
        std::string name;
        std::vector<double> values;
    };
    struct Vector2 {
        std::string name;
        std::vector<std::array<double, 2>> values;
    };

    int nx_;
    int ny_;
    double h_;
    std::vector<Scalar> scalars_;
    std::vector<Vector2> vectors_;
};

/// Spreads per-fluid-cell values over the first `ny` rows of the layout;
/// solid cells get `fill`.
inline std::vector<double> scatter_cells(const MacLayout& layout, const std::vector<double>& fluid_values, int ny,
                                         double fill = 0.0)
{
    if (fluid_values.size() != static_cast<std::size_t>(layout.n_cells()))
        throw ConfigError("cell values do not match the grid");
    std::vector<double> out(static_cast<std::size_t>(layout.nx() * ny), fill);
    for (int c = 0; c < layout.n_cells(); ++c) {
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        if (j < ny) out[static_cast<std::size_t>(j * layout.nx() + i)] = fluid_values[static_cast<std::size_t>(c)];
    }
    return out;
}

inline std::vector<double> solid_indicator(const MacLayout& layout, int ny)
{
    std::vector<double> out(static_cast<std::size_t>(layout.nx() * ny), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < layout.nx(); ++i) out[static_cast<std::size_t>(j * layout.nx() + i)] = layout.solid(i, j);
    return out;
}

/// Cell-centered velocity (zero in solid cells).
inline std::vector<std::array<double, 2>> center_velocity(const MacLayout& layout, const CellVelocity& v, int ny)
{
    std::vector<std::array<double, 2>> out(static_cast<std::size_t>(layout.nx() * ny), {0.0, 0.0});
    for (const auto& [i, j] : layout.cells()) {
        if (j >= ny) continue;
        const auto [vx, vy] = v.at_center(layout, i, j);
        out[static_cast<std::size_t>(j * layout.nx() + i)] = {vx, vy};
    }
    return out;
}

/// "x,y,u" rows at the fluid cell centers.
inline void write_cell_csv(std::ostream& out, const MacLayout& layout, const std::vector<double>& fluid_values,
                           const std::string& column = "u")
{
    if (fluid_values.size() != static_cast<std::size_t>(layout.n_cells()))
        throw ConfigError("cell values do not match the grid");
    out << "x,y," << column << '\n';
    out.precision(12);
    const double h = layout.h();
    for (int c = 0; c < layout.n_cells(); ++c) {
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        out << (i + 0.5) * h << ',' << (j + 0.5) * h << ',' << fluid_values[static_cast<std::size_t>(c)] << '\n';
    }
}

}  // namespace porehom::io
