// porehom command-line driver. Exit codes: 0 success, 1 configuration error,
// 2 solver failure.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porehom/config.hpp"
#include "porehom/errors.hpp"
#include "porehom/io.hpp"
#include "porehom/log.hpp"
#include "porehom/pipeline.hpp"
#include "porehom/porescale.hpp"

namespace fs = std::filesystem;
using namespace porehom;

namespace {

// Shortest round-trip representation, always with a decimal point or exponent.
std::string number(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

toml::table load(const std::string& path) { return path.empty() ? toml::table{} : config::parse_file(path); }

std::ofstream open_output(const std::string& path)
{
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

/// Geometry and fluid flags shared by `cell` and `sweep`.
struct CellFlags {
    std::string kind;
    double side = 0.45;
    double width = 0.3;
    double height = 0.5;
    std::string mask;
    int n = 0;
    double M = 1.0, R = 1.0, Ca = 1.0, Re = 1.0, Eu_bar = 1.0, xi = 0.05, slip = 0.0, angle_deg = 90.0;
    std::vector<double> center;
    bool filter = false;
    bool no_filter = false;
    int steps = 0;

    std::vector<CLI::Option*> opts;
    CLI::Option *kind_opt{}, *side_opt{}, *width_opt{}, *height_opt{}, *mask_opt{}, *n_opt{};
    CLI::Option *M_opt{}, *R_opt{}, *Ca_opt{}, *Re_opt{}, *Eu_opt{}, *xi_opt{}, *slip_opt{}, *angle_opt{};
    CLI::Option *center_opt{}, *filter_opt{}, *no_filter_opt{}, *steps_opt{};

    void attach(CLI::App* app)
    {
        kind_opt = app->add_option("--kind", kind, "obstacle, cross, channel, mask or empty")
                       ->check(CLI::IsMember({"obstacle", "cross", "channel", "mask", "empty"}));
        side_opt = app->add_option("--side", side, "Obstacle side length");
        width_opt = app->add_option("--width", width, "Cross arm width");
        height_opt = app->add_option("--height", height, "Channel height");
        mask_opt = app->add_option("--geometry", mask, "0/1 mask file (implies --kind mask)");
        n_opt = app->add_option("--n", n, "Cells per side");
        M_opt = app->add_option("--M", M, "Viscosity ratio");
        R_opt = app->add_option("--R", R, "Density ratio");
        Ca_opt = app->add_option("--Ca", Ca, "Capillary number");
        Re_opt = app->add_option("--Re", Re, "Reynolds number");
        Eu_opt = app->add_option("--Eu-bar", Eu_bar, "Cell-problem Euler number");
        xi_opt = app->add_option("--xi", xi, "Interface width");
        slip_opt = app->add_option("--slip-length", slip, "Navier slip length");
        angle_opt = app->add_option("--contact-angle-deg", angle_deg, "Equilibrium contact angle");
        center_opt = app->add_option("--center", center, "Droplet center x y")->expected(2);
        filter_opt = app->add_flag("--filter", filter, "Mask recirculating cells");
        no_filter_opt = app->add_flag("--no-filter", no_filter, "Keep recirculating cells");
        steps_opt = app->add_option("--relax-steps", steps, "Preprocessing step budget");
    }

    void apply(config::GeometrySpec& g, FluidParams& f, PhaseFieldParams& p, std::optional<Point2>& c, bool& filt) const
    {
        if (*mask_opt) {
            g.kind = config::make_geometry("mask", 0.0, mask);
            if (!*n_opt) g.n = 0;
        } else if (*kind_opt) {
            const double size = kind == "cross" ? width : kind == "channel" ? height : side;
            g.kind = config::make_geometry(kind, size, mask);
        } else if (*side_opt || *width_opt || *height_opt) {
            throw ConfigError("--side, --width and --height need --kind");
        }
        if (*n_opt) g.n = n;
        if (*M_opt) f.M = M;
        if (*R_opt) f.R = R;
        if (*Ca_opt) f.Ca = Ca;
        if (*Re_opt) f.Re = Re;
        if (*Eu_opt) f.Eu_bar = Eu_bar;
        if (*xi_opt) f.xi = xi;
        if (*slip_opt) f.slip_length = slip;
        if (*angle_opt) f.contact_angle = angle_deg * M_PI / 180.0;
        if (*center_opt) c = Point2{center[0], center[1]};
        if (*filter_opt && *no_filter_opt) throw ConfigError("--filter and --no-filter are exclusive");
        if (*filter_opt) filt = true;
        if (*no_filter_opt) filt = false;
        if (*steps_opt) {
            if (steps < 0) throw ConfigError("--relax-steps must be non-negative");
            p.max_steps = steps;
        }
    }
};

void write_cell_vtk(const std::string& path, const UnitCellGrid& grid, const CellEvaluation& ev)
{
    const MacLayout layout(grid);
    io::VtkImage image(grid.n(), grid.n(), grid.h());
    image.add_scalar("u", io::scatter_cells(layout, ev.field.values, grid.n()));
    image.add_scalar("solid", io::solid_indicator(layout, grid.n()));
    image.add_vector("w_x", io::center_velocity(layout, ev.solutions.pressure[0].w, grid.n()));
    image.add_vector("w_y", io::center_velocity(layout, ev.solutions.pressure[1].w, grid.n()));
    image.add_vector("w_surface", io::center_velocity(layout, ev.solutions.surface.w, grid.n()));
    image.write(path, grid.id());
}

void print_tensor(const char* name, const Tensor2& t)
{
    std::cout << name << " = [[" << number(t[0][0]) << ", " << number(t[0][1]) << "], [" << number(t[1][0]) << ", "
              << number(t[1][1]) << "]]\n";
}

void print_vector(const char* name, const Vec2& v)
{
    std::cout << name << " = [" << number(v[0]) << ", " << number(v[1]) << "]\n";
}

int run_geometry(const CellFlags& flags, const std::string& config_path, bool print_porosity,
                 const std::string& mask_out, const std::string& vtk_out)
{
    config::GeometrySpec g = config::read_geometry(load(config_path));
    FluidParams f;
    PhaseFieldParams p;
    std::optional<Point2> c;
    bool filt = false;
    flags.apply(g, f, p, c, filt);
    const UnitCellGrid grid = build_unit_cell(g.kind, g.n);
    if (print_porosity) {
        std::cout << number(porosity(grid)) << '\n';
    } else {
        std::cout << "geometry " << grid.id() << "\nn " << grid.n() << "\nporosity " << number(porosity(grid))
                  << "\nfluid_cells " << grid.fluid_cells() << "\ncomponents " << grid.fluid_components() << '\n';
    }
    if (!mask_out.empty()) write_mask_file(grid, mask_out);
    if (!vtk_out.empty()) {
        const MacLayout layout(grid);
        io::VtkImage image(grid.n(), grid.n(), grid.h());
        image.add_scalar("solid", io::solid_indicator(layout, grid.n()));
        image.write(vtk_out, grid.id());
    }
    return 0;
}

int run_cell(const CellFlags& flags, const std::string& config_path, std::optional<double> radius,
             std::optional<std::string> prefix, bool vtk)
{
    config::CellJob job = config::read_cell(load(config_path));
    flags.apply(job.geometry, job.fluid, job.phase, job.center, job.filter);
    if (radius) job.radius = *radius;
    if (prefix) job.output_prefix = *prefix;
    job.fluid.validate();

    const UnitCellGrid grid = build_unit_cell(job.geometry.kind, job.geometry.n);
    const Point2 center = job.center.value_or(default_center(job.geometry.kind));
    PhaseField u = prepare_droplet(grid, center, job.radius, job.fluid, job.phase);
    const CellEvaluation ev = evaluate_phase_field(grid, std::move(u), job.fluid, job.filter);
    const Tensor2 kappa = permeability_cache().get(grid, job.fluid, job.filter);

    const auto& e = ev.effective;
    std::cout << "geometry " << grid.id() << "\nsaturation " << number(e.s1) << '\n';
    print_tensor("K1", e.K1);
    print_tensor("K2", e.K2);
    print_vector("M1", e.M1);
    print_vector("M2", e.M2);
    print_tensor("kappa_abs", kappa);
    if (const auto k = isotropic_value(kappa)) {
        const RelPermRecord rec = make_record(e, *k, job.fluid, grid.id(), describe_droplet(center, job.radius));
        print_tensor("Krel1", rec.Krel1);
        print_tensor("Krel2", rec.Krel2);
        auto out = open_output(job.output_prefix + "_relperm.csv");
        write_relperm_csv(out, {rec});
    } else {
        log::warn("absolute permeability is anisotropic; relative permeabilities are not reported");
    }
    if (vtk) write_cell_vtk(job.output_prefix + ".vtk", grid, ev);
    return 0;
}

int run_sweep(const CellFlags& flags, const std::string& config_path, const std::vector<double>& radii,
              std::optional<int> workers, std::optional<std::string> output, std::optional<std::string> vtk_dir)
{
    config::SweepJob job = config::read_sweep(load(config_path));
    config::GeometrySpec g{job.config.geometry, job.config.n};
    flags.apply(g, job.config.fluid, job.config.phase, job.config.center, job.config.filter);
    job.config.geometry = g.kind;
    job.config.n = g.n;
    if (!radii.empty()) job.config.radii = radii;
    if (workers) job.config.workers = *workers;
    if (output) job.output = *output;
    if (vtk_dir) job.vtk_dir = *vtk_dir;

    if (!job.vtk_dir.empty()) {
        fs::create_directories(job.vtk_dir);
        const UnitCellGrid grid = build_unit_cell(job.config.geometry, job.config.n);
        job.config.on_cell = [&job, grid](std::size_t k, const CellEvaluation& ev) {
            write_cell_vtk((fs::path(job.vtk_dir) / ("radius_" + std::to_string(k) + ".vtk")).string(), grid, ev);
        };
    }
    const SweepResult result = sweep(job.config);
    auto out = open_output(job.output);
    write_relperm_csv(out, result.records);
    std::cout << "wrote " << result.records.size() << " records to " << job.output << '\n';
    if (!result.failures.empty()) {
        for (const auto& f : result.failures) std::cerr << "failed: " << f << '\n';
        return 2;
    }
    return 0;
}

struct PoreScaleFlags {
    int ny = 40;
    double dt = 0.01, t_end = 0.1, p_inlet = 0.0, p_outlet = 0.0, angle_deg = 90.0, bulge = 0.0, interface_x = 0.5;
    double slip = 0.0, M = 1.0, R = 1.0, Ca = 1.0, Re = 1.0, xi = 0.1;
    int vtk_every = 0;
    std::string output, vtk_prefix;
    CLI::Option *ny_opt{}, *dt_opt{}, *t_end_opt{}, *p_in_opt{}, *p_out_opt{}, *angle_opt{}, *bulge_opt{}, *ix_opt{};
    CLI::Option *slip_opt{}, *M_opt{}, *R_opt{}, *Ca_opt{}, *Re_opt{}, *xi_opt{}, *vtk_every_opt{}, *output_opt{},
        *vtk_prefix_opt{};

    void attach(CLI::App* app)
    {
        ny_opt = app->add_option("--ny", ny, "Cells across the channel");
        dt_opt = app->add_option("--dt", dt, "Time step");
        t_end_opt = app->add_option("--t-end", t_end, "Final time");
        p_in_opt = app->add_option("--p-inlet", p_inlet, "Inlet pressure");
        p_out_opt = app->add_option("--p-outlet", p_outlet, "Outlet pressure");
        angle_opt = app->add_option("--contact-angle-deg", angle_deg, "Equilibrium contact angle");
        bulge_opt = app->add_option("--bulge", bulge, "Initial interface bulge");
        ix_opt = app->add_option("--interface-x", interface_x, "Initial interface position at the walls");
        slip_opt = app->add_option("--slip-length", slip, "Navier slip length");
        M_opt = app->add_option("--M", M, "Viscosity ratio");
        R_opt = app->add_option("--R", R, "Density ratio");
        Ca_opt = app->add_option("--Ca", Ca, "Capillary number");
        Re_opt = app->add_option("--Re", Re, "Reynolds number");
        xi_opt = app->add_option("--xi", xi, "Interface width");
        vtk_every_opt = app->add_option("--vtk-every", vtk_every, "Write fields every k steps (0: never)");
        output_opt = app->add_option("--output", output, "Summary CSV path");
        vtk_prefix_opt = app->add_option("--vtk-prefix", vtk_prefix, "Field file prefix");
    }

    void apply(config::PoreScaleJob& job) const
    {
        auto& c = job.config;
        if (*ny_opt) c.ny = ny;
        if (*dt_opt) c.dt = dt;
        if (*t_end_opt) c.t_end = t_end;
        if (*p_in_opt) c.p_inlet = p_inlet;
        if (*p_out_opt) c.p_outlet = p_outlet;
        if (*angle_opt) c.fluid.contact_angle = angle_deg * M_PI / 180.0;
        if (*bulge_opt) c.bulge = bulge;
        if (*ix_opt) c.interface_x = interface_x;
        if (*slip_opt) c.fluid.slip_length = slip;
        if (*M_opt) c.fluid.M = M;
        if (*R_opt) c.fluid.R = R;
        if (*Ca_opt) c.fluid.Ca = Ca;
        if (*Re_opt) c.fluid.Re = Re;
        if (*xi_opt) c.fluid.xi = xi;
        if (*vtk_every_opt) {
            if (vtk_every < 0) throw ConfigError("--vtk-every must be non-negative");
            job.vtk_every = vtk_every;
        }
        if (*output_opt) job.output = output;
        if (*vtk_prefix_opt) job.vtk_prefix = vtk_prefix;
    }
};

int run_porescale(const PoreScaleFlags& flags, const std::string& config_path)
{
    config::PoreScaleJob job = config::read_porescale(load(config_path));
    flags.apply(job);
    job.config.validate();
    const MacLayout layout = channel_layout(job.config);
    const int ny = job.config.ny;
    auto observer = [&](const PoreScaleState& s, int k) {
        if (job.vtk_every == 0 || k % job.vtk_every != 0) return;
        io::VtkImage image(layout.nx(), ny, layout.h());
        image.add_scalar("u", io::scatter_cells(layout, s.u.values, ny));
        image.add_scalar("p", io::scatter_cells(layout, s.p, ny));
        image.add_vector("v", io::center_velocity(layout, s.v, ny));
        image.write(job.vtk_prefix + "_" + std::to_string(k) + ".vtk", "porescale t=" + number(s.t));
    };
    const PoreScaleRun result = run(job.config, std::nullopt, observer);
    auto out = open_output(job.output);
    write_porescale_summary_csv(out, result.summary);
    const auto& last = result.summary.back();
    std::cout << "t " << number(last.t) << "\nmax_abs_v " << number(last.max_velocity) << '\n';
    if (last.theta_bottom)
        std::cout << "theta_bottom_deg " << number(*last.theta_bottom * 180.0 / M_PI) << '\n';
    if (last.theta_top) std::cout << "theta_top_deg " << number(*last.theta_top * 180.0 / M_PI) << '\n';
    return 0;
}

int run_nondim(const std::string& config_path, bool all_ones)
{
    const ReferenceValues refs = all_ones ? ReferenceValues{} : config::read_reference(load(config_path));
    const DimensionlessNumbers d = nondim(refs);
    std::cout << "Re " << number(d.Re) << "\nCa " << number(d.Ca) << "\nEu " << number(d.Eu) << "\nFr "
              << number(d.Fr) << "\nS " << number(d.S) << "\neps " << number(d.eps) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Homogenized two-phase flow in periodic pore geometries"};
    app.require_subcommand(1);
    bool quiet = false;
    bool verbose = false;
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");
    app.add_flag("-v,--verbose", verbose, "Progress messages");

    std::string config_path;

    auto* geometry = app.add_subcommand("geometry", "Build a unit cell and report its porosity");
    CellFlags geometry_flags;
    geometry_flags.attach(geometry);
    geometry->add_option("--config", config_path, "TOML configuration")->check(CLI::ExistingFile);
    bool print_porosity = false;
    std::string mask_out, geometry_vtk;
    geometry->add_flag("--print-porosity", print_porosity, "Print only the porosity");
    geometry->add_option("--write-mask", mask_out, "Write the 0/1 mask");
    geometry->add_option("--vtk", geometry_vtk, "Write the solid indicator as VTK");

    auto* cell = app.add_subcommand("cell", "Relax one droplet and solve its cell problems");
    CellFlags cell_flags;
    cell_flags.attach(cell);
    cell->add_option("--config", config_path, "TOML configuration")->check(CLI::ExistingFile);
    std::optional<double> radius;
    std::optional<std::string> prefix;
    bool cell_vtk = false;
    cell->add_option("--radius", radius, "Droplet radius");
    cell->add_option("--output-prefix", prefix, "Prefix of the CSV and VTK outputs");
    cell->add_flag("--vtk", cell_vtk, "Write phase field and cell velocities as VTK");

    auto* sweep_cmd = app.add_subcommand("sweep", "Relative permeability over a nested droplet family");
    CellFlags sweep_flags;
    sweep_flags.attach(sweep_cmd);
    sweep_cmd->add_option("--config", config_path, "TOML configuration")->check(CLI::ExistingFile);
    std::vector<double> radii;
    std::optional<int> workers;
    std::optional<std::string> output, vtk_dir;
    sweep_cmd->add_option("--radii", radii, "Strictly increasing radii");
    sweep_cmd->add_option("--workers", workers, "Concurrent radii");
    sweep_cmd->add_option("--output", output, "CSV path");
    sweep_cmd->add_option("--vtk-dir", vtk_dir, "Directory for per-radius VTK fields");

    auto* porescale = app.add_subcommand("porescale", "Transient two-phase channel flow");
    PoreScaleFlags porescale_flags;
    porescale_flags.attach(porescale);
    porescale->add_option("--config", config_path, "TOML configuration")->check(CLI::ExistingFile);

    auto* nondim_cmd = app.add_subcommand("nondim", "Dimensionless numbers from reference values");
    nondim_cmd->add_option("--config", config_path, "TOML file with a [reference] table")->check(CLI::ExistingFile);
    bool all_ones = false;
    nondim_cmd->add_flag("--all-ones", all_ones, "Use unit reference values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    log::level() = quiet ? log::Level::quiet : verbose ? log::Level::info : log::Level::warning;

    try {
        if (*geometry) return run_geometry(geometry_flags, config_path, print_porosity, mask_out, geometry_vtk);
        if (*cell) return run_cell(cell_flags, config_path, radius, prefix, cell_vtk);
        if (*sweep_cmd) return run_sweep(sweep_flags, config_path, radii, workers, output, vtk_dir);
        if (*porescale) return run_porescale(porescale_flags, config_path);
        if (*nondim_cmd) return run_nondim(config_path, all_ones);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
