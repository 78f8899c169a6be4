#pragma once

// Saturation sweeps over a nested droplet family and the reference-value
// calculator for the dimensionless numbers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "porehom/effective.hpp"
#include "porehom/errors.hpp"
#include "porehom/fluid.hpp"
#include "porehom/geometry.hpp"
#include "porehom/log.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/stokescell.hpp"
#include "porehom/streamflow.hpp"

namespace porehom {

/// Dimensional reference quantities (SI units or any consistent system).
struct ReferenceValues {
    double length_macro = 1.0;  // L
    double length_micro = 1.0;  // l
    double velocity = 1.0;
    double density = 1.0;
    double viscosity = 1.0;
    double pressure = 1.0;
    double surface_tension = 1.0;  // gamma
    double gravity = 1.0;
    double diffusivity = 1.0;      // phase-field diffusivity sigma
};

struct DimensionlessNumbers {
    double Re;
    double Ca;
    double Eu;
    double Fr;
    double S;
    double eps;
};

inline DimensionlessNumbers nondim(const ReferenceValues& r)
{
    const double values[] = {r.length_macro, r.length_micro, r.velocity,        r.density,
                             r.viscosity,    r.pressure,     r.surface_tension, r.gravity, r.diffusivity};
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("reference values must be positive and finite");
    return {r.density * r.velocity * r.length_macro / r.viscosity,
            r.velocity * r.viscosity / r.surface_tension,
            r.pressure / (r.density * r.velocity * r.velocity),
            r.velocity / std::sqrt(r.gravity * r.length_macro),
            r.diffusivity / r.velocity,
            r.length_micro / r.length_macro};
}

/// Effective parameters of one phase field.
struct CellEvaluation {
    PhaseField field;
    CellSolutions solutions;
    EffectiveParameters effective;
    std::vector<NetFlowMask> masks;
};

struct SweepConfig {
    GeometryKind geometry = shape::Obstacle{0.45};
    int n = 80;
    std::optional<Point2> center;  // default depends on the geometry
    std::vector<double> radii;     // empty selects 12 radii over the admissible range
    FluidParams fluid;
    PhaseFieldParams phase;        // xi and theta_eq are taken from `fluid`
    bool filter = false;
    int workers = 0;               // 0: POREHOM_WORKERS or the hardware concurrency
    // Called from the worker threads once per evaluated radius (index into the
    // radius list); must be safe to call concurrently.
    std::function<void(std::size_t, const CellEvaluation&)> on_cell;
};

/// Default droplet center: the largest pore of the reference geometries.
inline Point2 default_center(const GeometryKind& kind)
{
    if (std::holds_alternative<shape::Obstacle>(kind)) return {0.0, 0.0};
    return {0.5, 0.5};
}

/// Twelve radii up to the distance at which the droplet covers the pore space.
inline std::vector<double> default_radii(const UnitCellGrid& grid, Point2 center, double xi)
{
    double reach = 0.0;
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i) {
            if (grid.solid(i, j)) continue;
            double dx = std::abs((i + 0.5) * grid.h() - center[0]);
            double dy = std::abs((j + 0.5) * grid.h() - center[1]);
            dx = std::min(dx - std::floor(dx), 1.0 - (dx - std::floor(dx)));
            dy = std::min(dy - std::floor(dy), 1.0 - (dy - std::floor(dy)));
            reach = std::max(reach, std::hypot(dx, dy));
        }
    std::vector<double> radii;
    const double r_min = 2.0 * xi;
    const double r_max = reach + xi;
    for (int k = 0; k < 12; ++k) radii.push_back(r_min + (r_max - r_min) * k / 11.0);
    return radii;
}

inline CellEvaluation evaluate_phase_field(const UnitCellGrid& grid, PhaseField field, const FluidParams& fluid,
                                           bool filter)
{
    CellEvaluation ev;
    ev.field = std::move(field);
    ev.solutions = solve_all(grid, ev.field, fluid);
    if (filter)
        for (int axis = 0; axis < 2; ++axis)
            ev.masks.push_back(net_flow_mask(grid, ev.solutions.pressure[static_cast<std::size_t>(axis)].w, axis));
    auto& eff = ev.effective;
    std::tie(eff.K1, eff.K2) = mobility_tensors(grid, ev.field, ev.solutions.pressure, filter ? &ev.masks : nullptr);
    std::tie(eff.M1, eff.M2) = surface_tension_vectors(grid, ev.field, ev.solutions.surface);
    eff.s1 = saturation(grid, ev.field);
    eff.area = interfacial_area(grid, ev.field);
    eff.porosity = porosity(grid);
    eff.filtered = filter;
    return ev;
}

/// Initial droplet, relaxed with the saturation held at its initial value.
inline PhaseField prepare_droplet(const UnitCellGrid& grid, Point2 center, double radius, const FluidParams& fluid,
                                  PhaseFieldParams phase)
{
    phase.xi = fluid.xi;
    phase.theta_eq = fluid.contact_angle;
    const PhaseField initial = initial_droplet(grid, {center[0], center[1]}, radius, fluid.xi);
    return relax(grid, initial, nullptr, phase, saturation(grid, initial)).field;
}

inline int worker_budget(int requested)
{
    int workers = requested;
    if (workers <= 0) {
        if (const char* env = std::getenv("POREHOM_WORKERS")) {
            try {
                workers = std::stoi(env);
            } catch (const std::exception&) {
                throw ConfigError("POREHOM_WORKERS must be a positive integer");
            }
            if (workers <= 0) throw ConfigError("POREHOM_WORKERS must be a positive integer");
        } else {
            workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        }
    }
    return workers;
}

/// Absolute permeability cache keyed by geometry, resolution and flow parameters.
class PermeabilityCache {
public:
    Tensor2 get(const UnitCellGrid& grid, const FluidParams& fluid, bool filter)
    {
        std::ostringstream key;
        key << std::setprecision(17) << grid.id() << '|' << grid.n() << '|' << fluid.Re << '|' << fluid.Eu_bar << '|'
            << fluid.slip_length << '|' << filter;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (auto it = cache_.find(key.str()); it != cache_.end()) return it->second;
        }
        const Tensor2 k = absolute_permeability(grid, fluid, filter);
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(key.str(), k).first->second;
    }

private:
    std::mutex mutex_;
    std::map<std::string, Tensor2> cache_;
};

inline PermeabilityCache& permeability_cache()
{
    static PermeabilityCache cache;
    return cache;
}

struct SweepResult {
    std::vector<RelPermRecord> records;  // sorted by s1
    std::vector<std::string> failures;   // one message per failed radius
    Tensor2 kappa_abs{};
};

inline std::string describe_droplet(Point2 center, double radius)
{
    std::ostringstream os;
    os << "center=(" << center[0] << " " << center[1] << ") r=" << radius;
    return os.str();
}

/// Runs the droplet family of a sweep. Radii are processed concurrently; a
/// failing radius is logged and skipped.
inline SweepResult sweep(const SweepConfig& config)
{
    config.fluid.validate();
    if (config.radii.size() > 1)
        for (std::size_t k = 1; k < config.radii.size(); ++k)
            if (!(config.radii[k] > config.radii[k - 1])) throw ConfigError("sweep radii must be strictly increasing");
    for (double r : config.radii)
        if (!(r >= 0.0)) throw ConfigError("sweep radii must be non-negative");
    const Point2 center = config.center.value_or(default_center(config.geometry));
    if (!(center[0] >= 0.0 && center[0] <= 1.0 && center[1] >= 0.0 && center[1] <= 1.0))
        throw ConfigError("droplet center must lie in the unit cell");

    const UnitCellGrid grid = build_unit_cell(config.geometry, config.n);
    const std::vector<double> radii =
        config.radii.empty() ? default_radii(grid, center, config.fluid.xi) : config.radii;

    SweepResult result;
    result.kappa_abs = permeability_cache().get(grid, config.fluid, config.filter);
    const auto kappa = isotropic_value(result.kappa_abs);
    if (!kappa)
        throw ConfigError("absolute permeability of " + grid.id() + " is anisotropic; relative permeabilities are undefined");

    std::vector<std::optional<RelPermRecord>> slots(radii.size());
    std::vector<std::string> errors(radii.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < radii.size(); k = next++) {
            try {
                PhaseField u = prepare_droplet(grid, center, radii[k], config.fluid, config.phase);
                const CellEvaluation ev = evaluate_phase_field(grid, std::move(u), config.fluid, config.filter);
                if (config.on_cell) config.on_cell(k, ev);
                slots[k] = make_record(ev.effective, *kappa, config.fluid, grid.id(), describe_droplet(center, radii[k]));
                log::info("radius " + std::to_string(radii[k]) + ": s1 = " + std::to_string(ev.effective.s1));
            } catch (const std::exception& e) {
                errors[k] = "radius " + std::to_string(radii[k]) + ": " + e.what();
                log::warn(errors[k]);
            }
        }
    };
    const int workers = std::min<int>(worker_budget(config.workers), static_cast<int>(radii.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (slots[k]) result.records.push_back(std::move(*slots[k]));
        if (!errors[k].empty()) result.failures.push_back(errors[k]);
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const RelPermRecord& a, const RelPermRecord& b) { return a.s1 < b.s1; });
    return result;
}

}  // namespace porehom
