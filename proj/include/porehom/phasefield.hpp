#pragma once

// Allen-Cahn phase-field machinery on periodic unit cells: the double-well
// potential, initial droplets, the constrained relaxation that produces the
// phase distribution for the cell problems, and the saturation and
// interfacial-area functionals.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "porehom/errors.hpp"
#include "porehom/geometry.hpp"
#include "porehom/log.hpp"
#include "porehom/sparse_system.hpp"
#include "porehom/staggered_fields.hpp"

namespace porehom {

/// P(u) = 8 u^2 (1-u)^2 together with its first two derivatives.
struct DoubleWell {
    double p;
    double dp;
    double d2p;
};

inline DoubleWell double_well(double u)
{
    const double v = 1.0 - u;
    return {8.0 * u * u * v * v, 16.0 * u * v * (1.0 - 2.0 * u), 16.0 * (1.0 - 6.0 * u + 6.0 * u * u)};
}

template <class T>
T double_well_derivative(const T& u)
{
    return 16.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

/// sqrt(2 P(u)) = 4 |u (1-u)|, the equilibrium gradient magnitude times xi.
template <class T>
T sqrt_two_well(const T& u)
{
    using std::abs;
    using ad::abs;
    return 4.0 * abs(u * (1.0 - u));
}

/// cos(theta) with the neutral angle mapped to exactly zero.
inline double contact_cosine(double theta)
{
    const double c = std::cos(theta);
    return std::abs(c) < 1e-12 ? 0.0 : c;
}

/// Cell-centered phase field on the fluid cells of a grid (fluid cells in
/// row-major order), carrying its diffuse-interface width.
struct PhaseField {
    std::vector<double> values;
    double xi = 0.0;

    static PhaseField constant(const UnitCellGrid& grid, double value, double xi)
    {
        return {std::vector<double>(static_cast<std::size_t>(grid.fluid_cells()), value), xi};
    }
};

/// Coefficients of the discrete Allen-Cahn operator
///   div(v u) - diffusion lap(u) + reaction P'(u)
/// with outward wall derivative wall_slope * sqrt(2P(u)).
struct AllenCahnOperator {
    double diffusion = 1.0;
    double reaction = 1.0;
    double wall_slope = 0.0;
    double inlet_value = 1.0;  // Dirichlet value on an open inlet (bounded layouts only)
};

namespace detail {

// Derivative of u along the outward direction (di, dj) of cell (i, j).
template <class T>
T outward_derivative(const MacLayout& layout, const AllenCahnOperator& op, const std::vector<T>& u, int i, int j,
                     int di, int dj)
{
    const T& uc = u[static_cast<std::size_t>(layout.cell(i, j))];
    const int ni = i + di;
    const int nj = j + dj;
    const double h = layout.h();
    if (!layout.inside_x(ni)) {
        if (ni < 0) return (op.inlet_value - uc) * (2.0 / h);
        return T(0.0);
    }
    const int nb = layout.cell(ni, nj);
    if (nb < 0) {
        if (op.wall_slope == 0.0) return T(0.0);
        return op.wall_slope * sqrt_two_well(uc);
    }
    return (u[static_cast<std::size_t>(nb)] - uc) / h;
}

}  // namespace detail

/// Cell-centered gradient of u: mean of the two face derivatives per axis,
/// with wall faces taking the contact-angle derivative.
template <class T>
std::pair<T, T> cell_gradient(const MacLayout& layout, const AllenCahnOperator& op, const std::vector<T>& u, int i,
                              int j)
{
    using detail::outward_derivative;
    T gx = 0.5 * (outward_derivative(layout, op, u, i, j, 1, 0) - outward_derivative(layout, op, u, i, j, -1, 0));
    T gy = 0.5 * (outward_derivative(layout, op, u, i, j, 0, 1) - outward_derivative(layout, op, u, i, j, 0, -1));
    return {std::move(gx), std::move(gy)};
}

/// Adds the Allen-Cahn operator per fluid cell to `out` (size n_cells).
/// Advection is first-order upwind in conservative form.
template <class T, class V>
void add_allen_cahn(const MacLayout& layout, const AllenCahnOperator& op, const std::vector<T>& u,
                    const VelocityView<V>* velocity, std::vector<T>& out)
{
    using detail::outward_derivative;
    const double h = layout.h();
    for (int c = 0; c < layout.n_cells(); ++c) {
        const auto [i, j] = layout.cells()[static_cast<std::size_t>(c)];
        const T& uc = u[static_cast<std::size_t>(c)];
        T& r = out[static_cast<std::size_t>(c)];

        T lap = outward_derivative(layout, op, u, i, j, 1, 0) + outward_derivative(layout, op, u, i, j, -1, 0) +
                outward_derivative(layout, op, u, i, j, 0, 1) + outward_derivative(layout, op, u, i, j, 0, -1);
        r += (-op.diffusion / h) * lap;
        r += op.reaction * double_well_derivative(uc);

        if (velocity == nullptr) continue;
        auto neighbor_value = [&](int ni, int nj) -> T {
            if (!layout.inside_x(ni)) return ni < 0 ? T(op.inlet_value) : uc;
            const int nb = layout.cell(ni, nj);
            return nb < 0 ? uc : u[static_cast<std::size_t>(nb)];
        };
        auto flux = [&](const V& vn, int ni, int nj) -> T {
            const double s = ad::value_of(vn);
            if (s == 0.0) return T(0.0);
            return s > 0.0 ? vn * uc : vn * neighbor_value(ni, nj);
        };
        T adv = flux(velocity->x(i + 1, j), i + 1, j) + flux(-velocity->x(i, j), i - 1, j) +
                flux(velocity->y(i, j + 1), i, j + 1) + flux(-velocity->y(i, j), i, j - 1);
        r += adv / h;
    }
}

/// Logistic droplet profile u = 1 / (1 + exp(5 r / xi)), r = periodic
/// distance to the center minus the radius.
inline PhaseField initial_droplet(const UnitCellGrid& grid, std::pair<double, double> center, double radius,
                                  double xi)
{
    if (radius < 0.0) throw ConfigError("droplet radius must be non-negative");
    if (!(xi > 0.0)) throw ConfigError("interface width xi must be positive");
    PhaseField f{{}, xi};
    f.values.reserve(static_cast<std::size_t>(grid.fluid_cells()));
    const double h = grid.h();
    auto periodic_delta = [](double a, double b) {
        double d = std::abs(a - b);
        d -= std::floor(d);
        return std::min(d, 1.0 - d);
    };
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i) {
            if (grid.solid(i, j)) continue;
            const double dx = periodic_delta((i + 0.5) * h, center.first);
            const double dy = periodic_delta((j + 0.5) * h, center.second);
            const double r = std::hypot(dx, dy) - radius;
            f.values.push_back(1.0 / (1.0 + std::exp(5.0 * r / xi)));
        }
    return f;
}

/// u(z) = (1 + tanh(2 z / xi)) / 2, the flat equilibrium profile.
inline double equilibrium_profile_1d(double z, double xi)
{
    return 0.5 * (1.0 + std::tanh(2.0 * z / xi));
}

/// Mean of u over the pore space.
inline double saturation(const UnitCellGrid& grid, const PhaseField& u)
{
    (void)grid;
    double s = 0.0;
    for (double v : u.values) s += v;
    return s / static_cast<double>(u.values.size());
}

/// Mean over the pore space of the interface indicator (4/xi) u (1-u).
inline double interfacial_area(const UnitCellGrid& grid, const PhaseField& u)
{
    (void)grid;
    double a = 0.0;
    for (double v : u.values) a += 4.0 / u.xi * v * (1.0 - v);
    return a / static_cast<double>(u.values.size());
}

struct PhaseFieldParams {
    double S = 1.0;                      // phase-field diffusivity number
    double xi = 0.05;                    // diffuse interface width
    double theta_eq = M_PI / 2.0;        // contact angle measured through fluid 1
    double dt = 0.0;                     // pseudo-time step; 0 selects xi^2 / (4 S)
    double sat_penalty = 1.0;            // coefficient of the saturation forcing
    int max_steps = 50;
    double steady_tol = 1e-8;            // on max|du| / dt
    bool conservative = true;            // integral correction of P'
    bool saturation_forcing = true;      // interface-localized pull towards s_target
    bool require_steady = false;         // fail if max_steps is reached first
    double newton_tol = 1e-11;           // on max|update|
    int newton_max_iterations = 30;
    double divergence_tol = 1e-6;        // accepted max|div v| of an advecting field

    double time_step() const { return dt > 0.0 ? dt : xi * xi / (4.0 * S); }
};

struct RelaxResult {
    PhaseField field;
    int steps = 0;
    bool steady = false;
    std::vector<double> update_history;  // max|du| / dt per step
    std::vector<double> integral_history;  // integral of u over P after each step
};

/// Pseudo-time relaxation of
///   du/dtau + div(v u) = S xi lap u - S/xi P'(u) + S/xi mean_P(P'(u)) - c delta(u) (S_cur - s_target)
/// with the contact-angle flux on solid walls, by backward Euler and Newton.
/// The two nonlocal terms contribute rank-one blocks to the Jacobian; they are
/// kept out of the sparse matrix and applied through the Woodbury identity.
inline RelaxResult relax(const UnitCellGrid& grid, const PhaseField& u_init, const CellVelocity* velocity,
                         const PhaseFieldParams& params, double s_target)
{
    if (!(params.S > 0.0) || !(params.xi > 0.0)) throw ConfigError("phase-field parameters S and xi must be positive");
    if (!(params.theta_eq > 0.0 && params.theta_eq < M_PI)) throw ConfigError("contact angle must lie in (0, pi)");
    if (!(s_target >= 0.0 && s_target <= 1.0)) throw ConfigError("target saturation must lie in [0, 1]");
    if (u_init.values.size() != static_cast<std::size_t>(grid.fluid_cells()))
        throw ConfigError("phase field does not match the grid");
    const double dt = params.time_step();
    if (!(dt > 0.0)) throw ConfigError("pseudo-time step must be positive");
    if (params.xi < 4.0 * grid.h())
        log::warn("interface width xi = " + std::to_string(params.xi) + " is resolved by fewer than 4 cells");

    const MacLayout layout(grid);
    if (velocity != nullptr) {
        if (velocity->ux.size() != static_cast<std::size_t>(layout.n_xfaces()) ||
            velocity->uy.size() != static_cast<std::size_t>(layout.n_yfaces()))
            throw ConfigError("advecting velocity does not match the grid");
        double max_div = 0.0;
        for (double d : weighted_divergence(layout, *velocity, {})) max_div = std::max(max_div, std::abs(d));
        if (max_div > params.divergence_tol)
            throw SolverError("advecting velocity violates the divergence tolerance (max |div v| = " +
                              std::to_string(max_div) + ")");
    }

    AllenCahnOperator op;
    op.diffusion = params.S * params.xi;
    op.reaction = params.S / params.xi;
    op.wall_slope = contact_cosine(params.theta_eq) / params.xi;

    const int n = layout.n_cells();
    const double cell_vol = layout.cell_volume();
    RelaxResult result{u_init, 0, false, {}, {}};
    result.field.xi = params.xi;
    Vector u = Eigen::Map<const Vector>(u_init.values.data(), n);

    std::optional<VelocityView<double>> vel_view;
    if (velocity != nullptr) vel_view.emplace(velocity->view(layout));

    IterativeSolver linear;
    SparseMatrix jac;
    Vector res;
    for (int step = 0; step < params.max_steps; ++step) {
        const Vector u_old = u;
        std::vector<double> newton_history;
        bool converged = false;
        for (int it = 0; it < params.newton_max_iterations; ++it) {
            double mean_dp = 0.0;
            for (int c = 0; c < n; ++c) mean_dp += double_well_derivative(u[c]);
            mean_dp /= n;
            const double s_now = u.mean();

            const auto vars = make_variables(u);
            std::vector<ad::SparseDual> r(static_cast<std::size_t>(n));
            // Low-rank part of the Jacobian: sum_k a_k b_k^T.
            Eigen::Matrix<double, Eigen::Dynamic, 2> a = Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(n, 2);
            Eigen::Matrix<double, Eigen::Dynamic, 2> b = Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(n, 2);
            const double forcing = params.sat_penalty * 4.0 / params.xi;
            for (int c = 0; c < n; ++c) {
                auto& rc = r[static_cast<std::size_t>(c)];
                rc = (vars[static_cast<std::size_t>(c)] - u_old[c]) / dt;
                if (params.conservative) {
                    rc -= op.reaction * mean_dp;
                    a(c, 0) = 1.0;
                    b(c, 0) = -op.reaction * double_well(u[c]).d2p / n;
                }
                if (params.saturation_forcing) {
                    const auto& uc = vars[static_cast<std::size_t>(c)];
                    rc += (forcing * (s_now - s_target)) * (uc * (1.0 - uc));
                    a(c, 1) = forcing * u[c] * (1.0 - u[c]);
                    b(c, 1) = 1.0 / n;
                }
            }
            add_allen_cahn(layout, op, vars, vel_view ? &*vel_view : nullptr, r);
            assemble_jacobian(r, n, jac, res);
            linear.compute(jac, "phase-field relaxation");
            const Vector y = linear.solve(-res, "phase-field relaxation");
            Eigen::Matrix<double, Eigen::Dynamic, 2> z(n, 2);
            for (int k = 0; k < 2; ++k)
                z.col(k) = a.col(k).isZero() ? Vector(Vector::Zero(n)) : linear.solve(a.col(k), "phase-field relaxation");
            const Eigen::Matrix2d cap = Eigen::Matrix2d::Identity() + b.transpose() * z;
            const Vector du = y - z * cap.fullPivLu().solve(b.transpose() * y);
            u += du;
            const double upd = du.lpNorm<Eigen::Infinity>();
            newton_history.push_back(upd);
            if (!std::isfinite(upd)) break;
            if (upd <= params.newton_tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw SolverError("phase-field relaxation: Newton did not converge in step " + std::to_string(step),
                              newton_history);

        const double change = (u - u_old).lpNorm<Eigen::Infinity>() / dt;
        result.update_history.push_back(change);
        result.integral_history.push_back(u.sum() * cell_vol);
        result.steps = step + 1;
        if (change <= params.steady_tol) {
            result.steady = true;
            break;
        }
    }

    result.field.values.assign(u.data(), u.data() + n);
    if (params.require_steady) {
        if (!result.steady)
            throw SolverError("phase-field relaxation did not reach a steady state within " +
                                  std::to_string(params.max_steps) + " steps",
                              result.update_history);
        if (params.saturation_forcing && std::abs(u.mean() - s_target) > 10.0 * params.steady_tol)
            throw SolverError("phase-field relaxation reached a steady state away from the target saturation",
                              result.update_history);
    }
    return result;
}

}  // namespace porehom
