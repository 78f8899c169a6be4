#pragma once

#include <cmath>
#include <string>

#include "porehom/errors.hpp"

namespace porehom {

/// Dimensionless fluid parameters shared by the cell problems and the
/// pore-scale model. Viscosity and density are scaled by fluid 2.
struct FluidParams {
    double M = 1.0;       // viscosity ratio mu_1 / mu_2
    double R = 1.0;       // density ratio rho_1 / rho_2
    double Ca = 1.0;
    double Re = 1.0;
    double Eu_bar = 1.0;  // eps^2 Eu
    double xi = 0.05;
    double slip_length = 0.0;
    double contact_angle = M_PI / 2.0;

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
        };
        positive(M, "viscosity ratio M");
        positive(R, "density ratio R");
        positive(Ca, "capillary number Ca");
        positive(Re, "Reynolds number Re");
        positive(Eu_bar, "Euler number Eu_bar");
        positive(xi, "interface width xi");
        if (!(slip_length >= 0.0)) throw ConfigError("slip length must be non-negative");
        if (!(contact_angle > 0.0 && contact_angle < M_PI)) throw ConfigError("contact angle must lie in (0, pi)");
    }

    template <class T>
    T mu(const T& u) const
    {
        return 1.0 + u * (M - 1.0);
    }

    template <class T>
    T rho(const T& u) const
    {
        return 1.0 + u * (R - 1.0);
    }

    /// Coefficient of div(grad u (x) grad u) in the momentum balance.
    double surface_tension_coefficient() const { return 1.5 * xi / Ca; }
};

}  // namespace porehom
