#pragma once

#include "nltr/surface.hpp"

namespace nltr_test {

// One default-configuration surface shared by every test in the process.
inline const nltr::impedance_surface& reference_surface() {
    static const nltr::impedance_surface s = nltr::build_surface(
        nltr::nonlinear_circuit{}, nltr::default_surface_grid(),
        nltr::solver_settings{});
    return s;
}

} // namespace nltr_test
