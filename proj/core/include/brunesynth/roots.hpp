#pragma once

#include <vector>

#include "brunesynth/extended.hpp"
#include "brunesynth/polynomial.hpp"

namespace brunesynth {

struct RootOptions {
    int max_iterations = 800;
    // Relative step size at which a root counts as converged, in units of the working epsilon.
    double step_tolerance_ulps = 256.0;
};

// All complex roots of p (Aberth-Ehrlich, Newton-polygon starting points).
// Exact zero roots are split off first and returned as exact zeros.
std::vector<Complex> polynomial_roots(const Poly<Real>& p, const RootOptions& opt = {});

}  // namespace brunesynth
