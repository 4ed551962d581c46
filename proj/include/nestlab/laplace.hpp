#pragma once

#include "nestlab/errors.hpp"
#include "nestlab/geom.hpp"

namespace nestlab {

// Conformal modulus of the annulus between two closed polylines, normalized
// so the round annulus 1 < |z| < r has modulus ln r.  Finite differences on
// a log-polar grid (conformally equivalent, so extreme radius ratios cost
// nothing), Shortley-Weller at the boundary, Richardson extrapolated.
double annulus_modulus(const Polyline& outer, const Polyline& inner,
                       double* error_estimate = nullptr, int grid = 256);

// ln of the conformal radius of the region bounded by `boundary` seen from
// z0: solve the Dirichlet problem with boundary data ln|zeta - z0| and read
// the value at the basepoint (the grid bottom in log coordinates).
double log_conformal_radius(const Polyline& boundary, Complex z0,
                            double* error_estimate = nullptr, int grid = 256);

}  // namespace nestlab
