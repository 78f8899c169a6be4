#pragma once

// TOML configuration for the command-line jobs. Unknown keys are rejected so
// that a misspelled parameter never falls back to its default silently.
//
//   [geometry]  kind = "obstacle" | "cross" | "channel" | "mask" | "empty"
//               side / width / height / path, n
//   [fluid]     M, R, Ca, Re, Eu_bar, xi, slip_length, contact_angle_deg
//   [phase]     S, dt, sat_penalty, max_steps, steady_tol, conservative, saturation_forcing
//   [sweep]     center = [x, y], radii = [...], filter, workers, output, vtk_dir
//   [cell]      center = [x, y], radius, filter, output_prefix
//   [porescale] length, height, ny, Eu, Fr, S, eps, gravity, p_inlet, p_outlet,
//               u_inlet, interface_x, bulge, dt, t_end, output, vtk_every, vtk_prefix
//   [reference] length_macro, length_micro, velocity, density, viscosity,
//               pressure, surface_tension, gravity, diffusivity

#include <cmath>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "porehom/errors.hpp"
#include "porehom/fluid.hpp"
#include "porehom/geometry.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/pipeline.hpp"
#include "porehom/porescale.hpp"

namespace porehom::config {

namespace detail {

inline void check_keys(const toml::table& t, std::string_view section, std::initializer_list<std::string_view> allowed)
{
    for (const auto& [key, node] : t) {
        bool known = false;
        for (auto a : allowed) known = known || key.str() == a;
        if (!known) throw ConfigError("unknown key '" + std::string(key.str()) + "' in [" + std::string(section) + "]");
    }
}

inline const toml::table* section(const toml::table& root, std::string_view name)
{
    const toml::node* node = root.get(name);
    if (node == nullptr) return nullptr;
    const toml::table* t = node->as_table();
    if (t == nullptr) throw ConfigError("[" + std::string(name) + "] must be a table");
    return t;
}

inline void read(const toml::table* t, std::string_view key, double& out)
{
    if (t == nullptr) return;
    const toml::node* node = t->get(key);
    if (node == nullptr) return;
    if (auto v = node->value_exact<double>()) out = *v;
    else if (auto i = node->value_exact<int64_t>()) out = static_cast<double>(*i);
    else throw ConfigError("'" + std::string(key) + "' must be a number");
}

inline void read(const toml::table* t, std::string_view key, int& out)
{
    if (t == nullptr) return;
    const toml::node* node = t->get(key);
    if (node == nullptr) return;
    const auto v = node->value_exact<int64_t>();
    if (!v) throw ConfigError("'" + std::string(key) + "' must be an integer");
    out = static_cast<int>(*v);
}

inline void read(const toml::table* t, std::string_view key, bool& out)
{
    if (t == nullptr) return;
    const toml::node* node = t->get(key);
    if (node == nullptr) return;
    const auto v = node->value_exact<bool>();
    if (!v) throw ConfigError("'" + std::string(key) + "' must be true or false");
    out = *v;
}

inline void read(const toml::table* t, std::string_view key, std::string& out)
{
    if (t == nullptr) return;
    const toml::node* node = t->get(key);
    if (node == nullptr) return;
    const auto v = node->value_exact<std::string>();
    if (!v) throw ConfigError("'" + std::string(key) + "' must be a string");
    out = *v;
}

inline std::vector<double> read_numbers(const toml::table* t, std::string_view key)
{
    std::vector<double> out;
    if (t == nullptr) return out;
    const toml::node* node = t->get(key);
    if (node == nullptr) return out;
    const toml::array* arr = node->as_array();
    if (arr == nullptr) throw ConfigError("'" + std::string(key) + "' must be an array of numbers");
    for (const auto& item : *arr) {
        if (auto v = item.value_exact<double>()) out.push_back(*v);
        else if (auto i = item.value_exact<int64_t>()) out.push_back(static_cast<double>(*i));
        else throw ConfigError("'" + std::string(key) + "' must be an array of numbers");
    }
    return out;
}

inline std::optional<Point2> read_point(const toml::table* t, std::string_view key)
{
    const auto v = read_numbers(t, key);
    if (t == nullptr || t->get(key) == nullptr) return std::nullopt;
    if (v.size() != 2) throw ConfigError("'" + std::string(key) + "' must be a pair [x, y]");
    return Point2{v[0], v[1]};
}

}  // namespace detail

inline toml::table parse_file(const std::string& path)
{
    try {
        return toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        std::string msg = "cannot parse '" + path + "': " + std::string(e.description());
        if (e.source().begin) msg += " (line " + std::to_string(e.source().begin.line) + ")";
        throw ConfigError(msg);
    }
}

struct GeometrySpec {
    GeometryKind kind = shape::Obstacle{0.45};
    int n = 80;
};

inline GeometryKind make_geometry(const std::string& kind, double size, const std::string& path)
{
    if (kind == "obstacle") return shape::Obstacle{size};
    if (kind == "cross") return shape::Cross{size};
    if (kind == "channel") return shape::Channel{size};
    if (kind == "empty") return shape::Empty{};
    if (kind == "mask") {
        if (path.empty()) throw ConfigError("geometry kind 'mask' needs a path");
        return shape::MaskFile{path};
    }
    throw ConfigError("unknown geometry kind '" + kind + "' (expected obstacle, cross, channel, mask or empty)");
}

inline GeometrySpec read_geometry(const toml::table& root)
{
    GeometrySpec g;
    const toml::table* t = detail::section(root, "geometry");
    if (t == nullptr) return g;
    detail::check_keys(*t, "geometry", {"kind", "side", "width", "height", "path", "n"});
    std::string kind = "obstacle";
    double side = 0.45;
    double width = 0.3;
    double height = 0.5;
    std::string path;
    detail::read(t, "kind", kind);
    detail::read(t, "side", side);
    detail::read(t, "width", width);
    detail::read(t, "height", height);
    detail::read(t, "path", path);
    detail::read(t, "n", g.n);
    const double size = kind == "cross" ? width : kind == "channel" ? height : side;
    g.kind = make_geometry(kind, size, path);
    if (kind == "mask" && t->get("n") == nullptr) g.n = 0;
    return g;
}

inline FluidParams read_fluid(const toml::table& root, FluidParams f = {})
{
    const toml::table* t = detail::section(root, "fluid");
    if (t == nullptr) return f;
    detail::check_keys(*t, "fluid", {"M", "R", "Ca", "Re", "Eu_bar", "xi", "slip_length", "contact_angle_deg"});
    detail::read(t, "M", f.M);
    detail::read(t, "R", f.R);
    detail::read(t, "Ca", f.Ca);
    detail::read(t, "Re", f.Re);
    detail::read(t, "Eu_bar", f.Eu_bar);
    detail::read(t, "xi", f.xi);
    detail::read(t, "slip_length", f.slip_length);
    double degrees = f.contact_angle * 180.0 / M_PI;
    detail::read(t, "contact_angle_deg", degrees);
    f.contact_angle = degrees * M_PI / 180.0;
    return f;
}

inline PhaseFieldParams read_phase(const toml::table& root)
{
    PhaseFieldParams p;
    const toml::table* t = detail::section(root, "phase");
    if (t == nullptr) return p;
    detail::check_keys(*t, "phase",
                       {"S", "dt", "sat_penalty", "max_steps", "steady_tol", "conservative", "saturation_forcing"});
    detail::read(t, "S", p.S);
    detail::read(t, "dt", p.dt);
    detail::read(t, "sat_penalty", p.sat_penalty);
    detail::read(t, "max_steps", p.max_steps);
    detail::read(t, "steady_tol", p.steady_tol);
    detail::read(t, "conservative", p.conservative);
    detail::read(t, "saturation_forcing", p.saturation_forcing);
    if (p.max_steps < 0) throw ConfigError("phase.max_steps must be non-negative");
    return p;
}

struct SweepJob {
    SweepConfig config;
    std::string output = "relperm.csv";
    std::string vtk_dir;  // empty: no per-radius fields
};

inline SweepJob read_sweep(const toml::table& root)
{
    SweepJob job;
    const GeometrySpec g = read_geometry(root);
    job.config.geometry = g.kind;
    job.config.n = g.n;
    job.config.fluid = read_fluid(root);
    job.config.phase = read_phase(root);
    const toml::table* t = detail::section(root, "sweep");
    if (t != nullptr) {
        detail::check_keys(*t, "sweep", {"center", "radii", "filter", "workers", "output", "vtk_dir"});
        job.config.center = detail::read_point(t, "center");
        job.config.radii = detail::read_numbers(t, "radii");
        detail::read(t, "filter", job.config.filter);
        detail::read(t, "workers", job.config.workers);
        detail::read(t, "output", job.output);
        detail::read(t, "vtk_dir", job.vtk_dir);
    }
    return job;
}

struct CellJob {
    GeometrySpec geometry;
    FluidParams fluid;
    PhaseFieldParams phase;
    std::optional<Point2> center;
    double radius = 0.25;
    bool filter = false;
    std::string output_prefix = "cell";
};

inline CellJob read_cell(const toml::table& root)
{
    CellJob job;
    job.geometry = read_geometry(root);
    job.fluid = read_fluid(root);
    job.phase = read_phase(root);
    const toml::table* t = detail::section(root, "cell");
    if (t != nullptr) {
        detail::check_keys(*t, "cell", {"center", "radius", "filter", "output_prefix"});
        job.center = detail::read_point(t, "center");
        detail::read(t, "radius", job.radius);
        detail::read(t, "filter", job.filter);
        detail::read(t, "output_prefix", job.output_prefix);
    }
    return job;
}

struct PoreScaleJob {
    PoreScaleConfig config;
    std::string output = "porescale_summary.csv";
    int vtk_every = 0;  // 0: no field output
    std::string vtk_prefix = "porescale";
};

inline PoreScaleJob read_porescale(const toml::table& root)
{
    PoreScaleJob job;
    job.config.fluid = read_fluid(root, job.config.fluid);
    const toml::table* t = detail::section(root, "porescale");
    if (t != nullptr) {
        detail::check_keys(*t, "porescale",
                           {"length", "height", "ny", "Eu", "Fr", "S", "eps", "gravity", "p_inlet", "p_outlet",
                            "u_inlet", "interface_x", "bulge", "dt", "t_end", "output", "vtk_every", "vtk_prefix"});
        auto& c = job.config;
        detail::read(t, "length", c.length);
        detail::read(t, "height", c.height);
        detail::read(t, "ny", c.ny);
        detail::read(t, "Eu", c.Eu);
        detail::read(t, "Fr", c.Fr);
        detail::read(t, "S", c.S);
        detail::read(t, "eps", c.eps);
        detail::read(t, "gravity", c.gravity);
        detail::read(t, "p_inlet", c.p_inlet);
        detail::read(t, "p_outlet", c.p_outlet);
        detail::read(t, "u_inlet", c.u_inlet);
        detail::read(t, "interface_x", c.interface_x);
        detail::read(t, "bulge", c.bulge);
        detail::read(t, "dt", c.dt);
        detail::read(t, "t_end", c.t_end);
        detail::read(t, "output", job.output);
        detail::read(t, "vtk_every", job.vtk_every);
        detail::read(t, "vtk_prefix", job.vtk_prefix);
    }
    if (job.vtk_every < 0) throw ConfigError("porescale.vtk_every must be non-negative");
    return job;
}

inline ReferenceValues read_reference(const toml::table& root)
{
    ReferenceValues r;
    const toml::table* t = detail::section(root, "reference");
    if (t == nullptr) return r;
    detail::check_keys(*t, "reference",
                       {"length_macro", "length_micro", "velocity", "density", "viscosity", "pressure",
                        "surface_tension", "gravity", "diffusivity"});
    detail::read(t, "length_macro", r.length_macro);
    detail::read(t, "length_micro", r.length_micro);
    detail::read(t, "velocity", r.velocity);
    detail::read(t, "density", r.density);
    detail::read(t, "viscosity", r.viscosity);
    detail::read(t, "pressure", r.pressure);
    detail::read(t, "surface_tension", r.surface_tension);
    detail::read(t, "gravity", r.gravity);
    detail::read(t, "diffusivity", r.diffusivity);
    return r;
}

}  // namespace porehom::config
