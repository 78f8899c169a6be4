#pragma once

// Transient pore-scale model in a straight channel: quasi-incompressible
// Navier-Stokes with phase-dependent density and viscosity, coupled to the
// advective Allen-Cahn equation through the advecting velocity and the
// capillary stress. One backward-Euler step solves the fully coupled system
// for (v, p, u) with Newton's method and exact sparse Jacobians.
//
// Geometry: x in (0, length) with a pressure inlet at x = 0 and a pressure
// outlet at x = length; walls at y = 0 and y = height. The walls are a single
// solid cell row seen through the periodic wrap of the y-direction.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "porehom/capillary.hpp"
#include "porehom/errors.hpp"
#include "porehom/fluid.hpp"
#include "porehom/log.hpp"
#include "porehom/mac_layout.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/sparse_system.hpp"
#include "porehom/staggered_fields.hpp"
#include "porehom/stokes_operator.hpp"

namespace porehom {

struct PoreScaleConfig {
    double length = 2.0;
    double height = 1.0;
    int ny = 40;  // cells across the channel; nx follows from the aspect ratio

    // M, R, Ca, Re, xi, slip_length and contact_angle are used; Eu_bar is not.
    FluidParams fluid{1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.0, M_PI / 2.0};
    double Eu = 1.0;
    double Fr = 1.0;
    double S = 1.0;
    double eps = 1.0;
    bool gravity = false;  // body force -(1/Fr^2) rho e_y

    double p_inlet = 0.0;
    double p_outlet = 0.0;
    double u_inlet = 1.0;  // phase-field value of the inflow

    // Initial interface x = interface_x - bulge (1 - (2y/height - 1)^2):
    // positive bulge puts the channel center behind the walls.
    double interface_x = 0.5;
    double bulge = 0.0;

    double dt = 0.01;
    double t_end = 0.1;
    double newton_tol = 1e-8;  // max-norm of the residual
    int newton_max_iterations = 25;

    int nx() const { return static_cast<int>(std::lround(length / height * ny)); }
    double h() const { return height / ny; }

    void validate() const
    {
        fluid.validate();
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
        };
        positive(length, "channel length");
        positive(height, "channel height");
        positive(Eu, "Euler number Eu");
        positive(Fr, "Froude number Fr");
        positive(S, "phase-field diffusivity S");
        positive(eps, "scale ratio eps");
        positive(dt, "time step dt");
        positive(newton_tol, "Newton tolerance");
        if (!(t_end >= 0.0)) throw ConfigError("end time must be non-negative");
        if (ny < 4) throw ConfigError("channel needs at least 4 cells across");
        if (nx() < 4) throw ConfigError("channel needs at least 4 cells along the flow");
        if (std::abs(nx() * h() - length) > 1e-9 * length)
            throw ConfigError("channel length must be a multiple of the cell size height / ny");
        if (newton_max_iterations < 1) throw ConfigError("Newton iteration budget must be positive");
        if (fluid.xi < 4.0 * h())
            log::warn("interface width xi = " + std::to_string(fluid.xi) + " is resolved by fewer than 4 cells");
    }
};

struct PoreScaleState {
    PhaseField u;         // per fluid cell
    CellVelocity v;
    std::vector<double> p;
    double t = 0.0;
};

/// Layout of the channel: nx x (ny + 1) cells, the last row solid.
inline MacLayout channel_layout(const PoreScaleConfig& config)
{
    const int nx = config.nx();
    const int ny = config.ny;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx * (ny + 1)), 0);
    for (int i = 0; i < nx; ++i) mask[static_cast<std::size_t>(ny * nx + i)] = 1;
    return MacLayout(nx, ny + 1, config.h(), false, std::move(mask));
}

/// Fluid 1 left of the (possibly curved) initial interface, equilibrium
/// profile across it, fluid at rest and uniform outlet pressure.
inline PoreScaleState initial_state(const PoreScaleConfig& config)
{
    config.validate();
    const MacLayout layout = channel_layout(config);
    const double h = config.h();
    const double width = config.eps * config.fluid.xi;
    PoreScaleState s;
    s.u.xi = config.fluid.xi;
    for (const auto& [i, j] : layout.cells()) {
        const double x = (i + 0.5) * h;
        const double eta = 2.0 * (j + 0.5) * h / config.height - 1.0;
        const double xc = config.interface_x - config.bulge * (1.0 - eta * eta);
        s.u.values.push_back(equilibrium_profile_1d(xc - x, width));
    }
    s.v = CellVelocity::zeros(layout);
    s.p.assign(static_cast<std::size_t>(layout.n_cells()), config.p_outlet);
    return s;
}

struct StepReport {
    int newton_iterations = 0;
    std::vector<double> residual_history;  // max-norm per Newton iteration, before the update
    double cfl = 0.0;
};

/// Assembles and solves one backward-Euler step.
class PoreScaleModel {
public:
    explicit PoreScaleModel(PoreScaleConfig config) : config_(std::move(config)), layout_(channel_layout(config_))
    {
        config_.validate();
        flow_.inv_re = 1.0 / config_.fluid.Re;
        flow_.euler = config_.Eu;
        flow_.ghost_factor = FlowOperator::slip_ghost_factor(config_.eps * config_.fluid.slip_length, layout_.h());
        flow_.p_inlet = config_.p_inlet;
        flow_.p_outlet = config_.p_outlet;
        phase_.diffusion = config_.S * config_.eps * config_.fluid.xi;
        phase_.reaction = config_.S / (config_.eps * config_.fluid.xi);
        phase_.wall_slope = contact_cosine(config_.fluid.contact_angle) / (config_.eps * config_.fluid.xi);
        phase_.inlet_value = config_.u_inlet;
        capillary_scale_ = config_.eps / config_.fluid.Ca * 1.5 * config_.fluid.xi;
    }

    const MacLayout& layout() const { return layout_; }
    const PoreScaleConfig& config() const { return config_; }

    PoreScaleState step(const PoreScaleState& old, StepReport* report = nullptr)
    {
        check_state(old);
        const int nxf = layout_.n_xfaces();
        const int nyf = layout_.n_yfaces();
        const int nc = layout_.n_cells();
        const int n = nxf + nyf + 2 * nc;

        Vector x(n);
        x << Eigen::Map<const Vector>(old.v.ux.data(), nxf), Eigen::Map<const Vector>(old.v.uy.data(), nyf),
            Eigen::Map<const Vector>(old.p.data(), nc), Eigen::Map<const Vector>(old.u.values.data(), nc);

        StepReport local;
        StepReport& rep = report != nullptr ? *report : local;
        rep = {};
        SparseMatrix jac;
        Vector res;
        bool converged = false;
        for (int it = 0; it < config_.newton_max_iterations; ++it) {
            assemble(old, x, jac, res);
            const double norm = res.lpNorm<Eigen::Infinity>();
            rep.residual_history.push_back(norm);
            if (!std::isfinite(norm)) break;
            if (norm <= config_.newton_tol) {
                converged = true;
                break;
            }
            lu_.factorize(jac, "pore-scale step");
            x -= lu_.solve(res, "pore-scale step");
            ++rep.newton_iterations;
        }
        if (!converged)
            throw SolverError("pore-scale step at t = " + std::to_string(old.t) + ": Newton did not converge",
                              rep.residual_history);

        PoreScaleState next;
        next.v.ux.assign(x.data(), x.data() + nxf);
        next.v.uy.assign(x.data() + nxf, x.data() + nxf + nyf);
        next.p.assign(x.data() + nxf + nyf, x.data() + nxf + nyf + nc);
        next.u.values.assign(x.data() + nxf + nyf + nc, x.data() + n);
        next.u.xi = old.u.xi;
        next.t = old.t + config_.dt;
        rep.cfl = next.v.max_abs() * config_.dt / layout_.h();
        if (rep.cfl > 1.0 && !cfl_warned_) {
            log::warn("pore-scale CFL number " + std::to_string(rep.cfl) +
                      " exceeds 1; the implicit scheme stays stable but advection is smeared");
            cfl_warned_ = true;
        }
        return next;
    }

private:
    void check_state(const PoreScaleState& s) const
    {
        if (s.u.values.size() != static_cast<std::size_t>(layout_.n_cells()) ||
            s.p.size() != static_cast<std::size_t>(layout_.n_cells()) ||
            s.v.ux.size() != static_cast<std::size_t>(layout_.n_xfaces()) ||
            s.v.uy.size() != static_cast<std::size_t>(layout_.n_yfaces()))
            throw ConfigError("pore-scale state does not match the channel grid");
    }

    // Residual rows: x-momentum, y-momentum, mass, phase field.
    void assemble(const PoreScaleState& old, const Vector& x, SparseMatrix& jac, Vector& res) const
    {
        using ad::SparseDual;
        using ad::value_of;
        const int nxf = layout_.n_xfaces();
        const int nyf = layout_.n_yfaces();
        const int nc = layout_.n_cells();
        const double h = layout_.h();
        const double dt = config_.dt;
        const auto& fluid = config_.fluid;

        const auto vars = make_variables(x);
        const std::vector<SparseDual> ux(vars.begin(), vars.begin() + nxf);
        const std::vector<SparseDual> uy(vars.begin() + nxf, vars.begin() + nxf + nyf);
        const std::vector<SparseDual> p(vars.begin() + nxf + nyf, vars.begin() + nxf + nyf + nc);
        const std::vector<SparseDual> u(vars.begin() + nxf + nyf + nc, vars.end());

        std::vector<SparseDual> mu(static_cast<std::size_t>(nc));
        std::vector<SparseDual> rho(static_cast<std::size_t>(nc));
        std::vector<double> rho_old(static_cast<std::size_t>(nc));
        for (int c = 0; c < nc; ++c) {
            const auto k = static_cast<std::size_t>(c);
            mu[k] = fluid.mu(u[k]);
            rho[k] = fluid.rho(u[k]);
            rho_old[k] = fluid.rho(old.u.values[k]);
        }

        auto column = [&](int i) { return std::clamp(i, 0, layout_.nx() - 1); };
        auto cell_at = [&](int i, int j) { return layout_.cell(column(i), j); };
        // Face density: mean over the adjacent fluid cells (one at open ends).
        auto face_rho = [&](auto&& values, int ia, int ja, int ib, int jb) {
            using R = std::decay_t<decltype(values[0])>;
            const int a = layout_.inside_x(ia) ? layout_.cell(ia, ja) : -1;
            const int b = layout_.inside_x(ib) ? layout_.cell(ib, jb) : -1;
            if (a < 0) return R(values[static_cast<std::size_t>(b)]);
            if (b < 0) return R(values[static_cast<std::size_t>(a)]);
            return R(0.5 * (values[static_cast<std::size_t>(a)] + values[static_cast<std::size_t>(b)]));
        };
        const VelocityView<SparseDual> vel{layout_, ux, uy};
        auto vx = [&](int i, int j) { return vel.x(std::clamp(i, 0, layout_.nx()), j); };
        auto vy = [&](int i, int j) { return vel.y(column(i), j); };
        auto upwind = [](const SparseDual& flux, const SparseDual& behind, const SparseDual& ahead) {
            return value_of(flux) >= 0.0 ? flux * behind : flux * ahead;
        };

        std::vector<SparseDual> rx(static_cast<std::size_t>(nxf));
        std::vector<SparseDual> ry(static_cast<std::size_t>(nyf));
        for (int f = 0; f < nxf; ++f) {
            const auto [i, j] = layout_.xfaces()[static_cast<std::size_t>(f)];
            const auto k = static_cast<std::size_t>(f);
            const SparseDual rf = face_rho(rho, i - 1, j, i, j);
            const double rf_old = face_rho(rho_old, i - 1, j, i, j);
            SparseDual r = (rf * ux[k] - rf_old * old.v.ux[k]) / dt;
            // Convective flux of x-momentum through the faces of the staggered control volume.
            const SparseDual fe = rho[static_cast<std::size_t>(cell_at(i, j))] * (0.5 * (vx(i, j) + vx(i + 1, j)));
            const SparseDual fw = rho[static_cast<std::size_t>(cell_at(i - 1, j))] * (0.5 * (vx(i - 1, j) + vx(i, j)));
            const SparseDual fn = corner_rho(rho, i, j + 1) * (0.5 * (vy(i - 1, j + 1) + vy(i, j + 1)));
            const SparseDual fs = corner_rho(rho, i, j) * (0.5 * (vy(i - 1, j) + vy(i, j)));
            r += (upwind(fe, vx(i, j), vx(i + 1, j)) - upwind(fw, vx(i - 1, j), vx(i, j)) +
                  upwind(fn, vx(i, j), vx(i, j + 1)) - upwind(fs, vx(i, j - 1), vx(i, j))) /
                 h;
            rx[k] = std::move(r);
        }
        for (int f = 0; f < nyf; ++f) {
            const auto [i, j] = layout_.yfaces()[static_cast<std::size_t>(f)];
            const auto k = static_cast<std::size_t>(f);
            const SparseDual rf = face_rho(rho, i, j - 1, i, j);
            const double rf_old = face_rho(rho_old, i, j - 1, i, j);
            SparseDual r = (rf * uy[k] - rf_old * old.v.uy[k]) / dt;
            const SparseDual fn = rho[static_cast<std::size_t>(cell_at(i, j))] * (0.5 * (vy(i, j) + vy(i, j + 1)));
            const SparseDual fs = rho[static_cast<std::size_t>(cell_at(i, j - 1))] * (0.5 * (vy(i, j - 1) + vy(i, j)));
            const SparseDual fe = corner_rho(rho, i + 1, j) * (0.5 * (vx(i + 1, j - 1) + vx(i + 1, j)));
            const SparseDual fw = corner_rho(rho, i, j) * (0.5 * (vx(i, j - 1) + vx(i, j)));
            r += (upwind(fn, vy(i, j), vy(i, j + 1)) - upwind(fs, vy(i, j - 1), vy(i, j)) +
                  upwind(fe, vy(i, j), vy(i + 1, j)) - upwind(fw, vy(i - 1, j), vy(i, j))) /
                 h;
            if (config_.gravity) r += rf / (config_.Fr * config_.Fr);
            ry[k] = std::move(r);
        }
        add_stokes_operator(layout_, flow_, ux, uy, p, mu, rx, ry);
        add_capillary_divergence(layout_, phase_, u, capillary_scale_, rx, ry);

        std::vector<SparseDual> rm(static_cast<std::size_t>(nc));
        std::vector<SparseDual> ru(static_cast<std::size_t>(nc));
        for (int c = 0; c < nc; ++c) {
            const auto k = static_cast<std::size_t>(c);
            rm[k] = (rho[k] - rho_old[k]) / dt;
            ru[k] = (u[k] - old.u.values[k]) / dt;
        }
        add_mass_flux(layout_, ux, uy, rho, rm);
        add_allen_cahn(layout_, phase_, u, &vel, ru);

        std::vector<SparseDual> residual;
        residual.reserve(static_cast<std::size_t>(x.size()));
        for (auto* block : {&rx, &ry, &rm, &ru})
            for (auto& r : *block) residual.push_back(std::move(r));
        assemble_jacobian(residual, static_cast<int>(x.size()), jac, res);
    }

    // Density at the corner (i h, j h): mean over the adjacent fluid cells.
    ad::SparseDual corner_rho(const std::vector<ad::SparseDual>& rho, int i, int j) const
    {
        ad::SparseDual sum(0.0);
        int count = 0;
        for (int dj = -1; dj <= 0; ++dj)
            for (int di = -1; di <= 0; ++di) {
                const int c = layout_.cell(std::clamp(i + di, 0, layout_.nx() - 1), j + dj);
                if (c < 0) continue;
                sum += rho[static_cast<std::size_t>(c)];
                ++count;
            }
        return count == 0 ? sum : sum / static_cast<double>(count);
    }

    PoreScaleConfig config_;
    MacLayout layout_;
    FlowOperator flow_;
    AllenCahnOperator phase_;
    double capillary_scale_ = 0.0;
    SparseLuSolver lu_;
    bool cfl_warned_ = false;
};

/// One step with a freshly assembled model.
inline PoreScaleState step(const PoreScaleState& state, const PoreScaleConfig& config, StepReport* report = nullptr)
{
    PoreScaleModel model(config);
    return model.step(state, report);
}

/// x-position of the u = 1/2 crossing in cell row j (fluid 1 on the left),
/// by linear interpolation between cell centers.
inline std::optional<double> interface_crossing(const MacLayout& layout, const PhaseField& u, int j)
{
    const double h = layout.h();
    for (int i = 0; i + 1 < layout.nx(); ++i) {
        const int a = layout.cell(i, j);
        const int b = layout.cell(i + 1, j);
        if (a < 0 || b < 0) return std::nullopt;
        const double ua = u.values[static_cast<std::size_t>(a)] - 0.5;
        const double ub = u.values[static_cast<std::size_t>(b)] - 0.5;
        if (ua >= 0.0 && ub < 0.0) return (i + 0.5 + ua / (ua - ub)) * h;
    }
    return std::nullopt;
}

/// Interface geometry read from the u = 1/2 contour. Angles are measured
/// through fluid 1 from the contour slope at the wall, extrapolated by a
/// quadratic through the crossings of the three cell rows next to it.
struct InterfaceShape {
    std::optional<double> theta_bottom;
    std::optional<double> theta_top;
    std::optional<double> center;  // crossing at mid-channel
    std::optional<double> bulge;   // wall crossings minus center crossing; > 0: center lags
};

inline InterfaceShape measure_interface(const MacLayout& layout, const PhaseField& u, int ny)
{
    const double h = layout.h();
    InterfaceShape s;
    // The contour x(s) with s the distance from the wall; the wall points into
    // fluid 1 along -x, so theta = atan2(1, -dx/ds) at s = 0. Rows sit at
    // s = h/2, 3h/2, 5h/2.
    auto wall_angle = [&](int row0, int direction) -> std::optional<double> {
        const auto x0 = interface_crossing(layout, u, row0);
        const auto x1 = interface_crossing(layout, u, row0 + direction);
        const auto x2 = interface_crossing(layout, u, row0 + 2 * direction);
        if (!x0 || !x1 || !x2) return std::nullopt;
        return std::atan2(1.0, -(-2.0 * *x0 + 3.0 * *x1 - *x2) / h);
    };
    const auto b0 = interface_crossing(layout, u, 0);
    const auto t0 = interface_crossing(layout, u, ny - 1);
    s.theta_bottom = wall_angle(0, 1);
    s.theta_top = wall_angle(ny - 1, -1);
    s.center = ny % 2 == 0 ? [&]() -> std::optional<double> {
        const auto lo = interface_crossing(layout, u, ny / 2 - 1);
        const auto hi = interface_crossing(layout, u, ny / 2);
        if (!lo || !hi) return std::nullopt;
        return 0.5 * (*lo + *hi);
    }()
                           : interface_crossing(layout, u, ny / 2);
    if (s.center && b0 && t0) s.bulge = 0.5 * (*b0 + *t0) - *s.center;
    return s;
}

struct PoreScaleSummary {
    double t = 0.0;
    double max_velocity = 0.0;
    std::optional<double> theta_bottom;
    std::optional<double> theta_top;
    double integral_u = 0.0;
    std::optional<double> interface_center;
    std::optional<double> interface_bulge;
    int newton_iterations = 0;
};

inline PoreScaleSummary summarize(const MacLayout& layout, const PoreScaleState& s, int ny)
{
    PoreScaleSummary row;
    row.t = s.t;
    row.max_velocity = s.v.max_abs();
    double integral = 0.0;
    for (double v : s.u.values) integral += v;
    row.integral_u = integral * layout.cell_volume();
    const InterfaceShape shape = measure_interface(layout, s.u, ny);
    row.theta_bottom = shape.theta_bottom;
    row.theta_top = shape.theta_top;
    row.interface_center = shape.center;
    row.interface_bulge = shape.bulge;
    return row;
}

struct PoreScaleRun {
    std::vector<PoreScaleSummary> summary;  // initial state first, then one row per step
    PoreScaleState final_state;
};

/// Steps from `initial` (or the configured initial state) to t_end. The
/// observer, when given, sees every state including the initial one.
inline PoreScaleRun run(const PoreScaleConfig& config, std::optional<PoreScaleState> initial = std::nullopt,
                        const std::function<void(const PoreScaleState&, int)>& observer = {})
{
    PoreScaleModel model(config);
    PoreScaleState state = initial ? std::move(*initial) : initial_state(config);
    PoreScaleRun out;
    out.summary.push_back(summarize(model.layout(), state, config.ny));
    if (observer) observer(state, 0);
    const int steps = static_cast<int>(std::ceil(config.t_end / config.dt - 1e-9));
    for (int k = 1; k <= steps; ++k) {
        StepReport report;
        state = model.step(state, &report);
        out.summary.push_back(summarize(model.layout(), state, config.ny));
        out.summary.back().newton_iterations = report.newton_iterations;
        if (observer) observer(state, k);
    }
    out.final_state = std::move(state);
    return out;
}

inline void write_porescale_summary_csv(std::ostream& out, const std::vector<PoreScaleSummary>& rows)
{
    out << "t,max_abs_v,theta_bottom,theta_top,integral_u,interface_center,interface_bulge,newton_iterations\n";
    out.precision(12);
    auto opt = [&](const std::optional<double>& v) -> std::ostream& {
        if (v) out << *v;
        else out << "nan";
        return out;
    };
    for (const auto& r : rows) {
        out << r.t << ',' << r.max_velocity << ',';
        opt(r.theta_bottom) << ',';
        opt(r.theta_top) << ',' << r.integral_u << ',';
        opt(r.interface_center) << ',';
        opt(r.interface_bulge) << ',' << r.newton_iterations << '\n';
    }
}

}  // namespace porehom
