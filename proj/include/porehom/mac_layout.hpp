#pragma once

// Degree-of-freedom layout of a staggered (MAC) grid with a cell-wise solid
// mask. Cells carry pressure and phase field, x-faces carry the x-velocity
// and y-faces the y-velocity. The y-direction is always periodic; the
// x-direction is either periodic (unit cells) or bounded by an inlet at
// x = 0 and an outlet at x = nx*h (pore-scale channel).

#include <cstdint>
#include <vector>

#include "porehom/geometry.hpp"

namespace porehom {

enum class FaceKind : std::uint8_t {
    dof,    // both adjacent cells fluid (or open boundary next to a fluid cell)
    wall,   // exactly one adjacent cell solid: zero normal velocity
    solid,  // both adjacent cells solid
};

class MacLayout {
public:
    MacLayout(int nx, int ny, double h, bool periodic_x, std::vector<std::uint8_t> solid_mask)
        : nx_(nx), ny_(ny), h_(h), periodic_x_(periodic_x), solid_(std::move(solid_mask))
    {
        cell_dof_.assign(static_cast<std::size_t>(nx_ * ny_), -1);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                if (!solid_[static_cast<std::size_t>(j * nx_ + i)]) {
                    cell_dof_[static_cast<std::size_t>(j * nx_ + i)] = n_cells_;
                    cells_.push_back({i, j});
                    ++n_cells_;
                }

        xface_dof_.assign(static_cast<std::size_t>(nx_faces() * ny_), -1);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_faces(); ++i)
                if (xface_kind(i, j) == FaceKind::dof) {
                    xface_dof_[static_cast<std::size_t>(j * nx_faces() + i)] = n_xfaces_;
                    xfaces_.push_back({i, j});
                    ++n_xfaces_;
                }

        yface_dof_.assign(static_cast<std::size_t>(nx_ * ny_), -1);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                if (yface_kind(i, j) == FaceKind::dof) {
                    yface_dof_[static_cast<std::size_t>(j * nx_ + i)] = n_yfaces_;
                    yfaces_.push_back({i, j});
                    ++n_yfaces_;
                }
    }

    explicit MacLayout(const UnitCellGrid& grid)
        : MacLayout(grid.n(), grid.n(), grid.h(), true, grid.solid_mask())
    {
    }

    struct Index2 {
        int i;
        int j;
    };

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }
    bool periodic_x() const { return periodic_x_; }
    int nx_faces() const { return periodic_x_ ? nx_ : nx_ + 1; }

    int wrap_y(int j) const { return ((j % ny_) + ny_) % ny_; }
    int wrap_x(int i) const { return periodic_x_ ? ((i % nx_) + nx_) % nx_ : i; }
    bool inside_x(int i) const { return periodic_x_ || (i >= 0 && i < nx_); }

    /// Solid flag; cells outside a bounded x-range count as fluid (open boundary).
    bool solid(int i, int j) const
    {
        const int wi = wrap_x(i);
        if (wi < 0 || wi >= nx_) return false;
        return solid_[static_cast<std::size_t>(wrap_y(j) * nx_ + wi)] != 0;
    }
    bool fluid(int i, int j) const { return !solid(i, j); }

    /// Fluid-cell number, or -1 for solid cells and cells outside the domain.
    int cell(int i, int j) const
    {
        const int wi = wrap_x(i);
        if (wi < 0 || wi >= nx_) return -1;
        return cell_dof_[static_cast<std::size_t>(wrap_y(j) * nx_ + wi)];
    }

    /// x-face at x = i*h in row j (between cells i-1 and i).
    FaceKind xface_kind(int i, int j) const
    {
        if (!periodic_x_ && (i <= 0 || i >= nx_)) {
            if (i < 0 || i > nx_) return FaceKind::solid;
            return fluid(i == 0 ? 0 : nx_ - 1, j) ? FaceKind::dof : FaceKind::solid;
        }
        return classify(solid(i - 1, j), solid(i, j));
    }
    int xface(int i, int j) const
    {
        if (!periodic_x_ && (i < 0 || i > nx_)) return -1;
        const int wi = periodic_x_ ? wrap_x(i) : i;
        return xface_dof_[static_cast<std::size_t>(wrap_y(j) * nx_faces() + wi)];
    }
    bool is_boundary_xface(int i) const { return !periodic_x_ && (i == 0 || i == nx_); }

    /// y-face at y = j*h in column i (between cells j-1 and j).
    FaceKind yface_kind(int i, int j) const { return classify(solid(i, j - 1), solid(i, j)); }
    int yface(int i, int j) const
    {
        const int wi = wrap_x(i);
        if (wi < 0 || wi >= nx_) return -1;
        return yface_dof_[static_cast<std::size_t>(wrap_y(j) * nx_ + wi)];
    }

    int n_cells() const { return n_cells_; }
    int n_xfaces() const { return n_xfaces_; }
    int n_yfaces() const { return n_yfaces_; }
    int n_faces() const { return n_xfaces_ + n_yfaces_; }

    const std::vector<Index2>& cells() const { return cells_; }
    const std::vector<Index2>& xfaces() const { return xfaces_; }
    const std::vector<Index2>& yfaces() const { return yfaces_; }

    double cell_volume() const { return h_ * h_; }

private:
    static FaceKind classify(bool solid_a, bool solid_b)
    {
        if (solid_a && solid_b) return FaceKind::solid;
        if (solid_a || solid_b) return FaceKind::wall;
        return FaceKind::dof;
    }

    int nx_;
    int ny_;
    double h_;
    bool periodic_x_;
    std::vector<std::uint8_t> solid_;

    std::vector<int> cell_dof_;
    std::vector<int> xface_dof_;
    std::vector<int> yface_dof_;
    std::vector<Index2> cells_;
    std::vector<Index2> xfaces_;
    std::vector<Index2> yfaces_;
    int n_cells_ = 0;
    int n_xfaces_ = 0;
    int n_yfaces_ = 0;
};

}  // namespace porehom
