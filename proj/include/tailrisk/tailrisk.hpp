#pragma once

// Umbrella header: extreme tail-risk estimation via peaks-over-threshold,
// with a Gaussian baseline, spectral risk measures by quadrature, and a
// semi-parametric bootstrap for precision metrics.

#include "tailrisk/bootstrap.hpp"
#include "tailrisk/diagnostics.hpp"
#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/normal.hpp"
#include "tailrisk/quadrature.hpp"
#include "tailrisk/risk_measures.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/serialize.hpp"
#include "tailrisk/timeseries.hpp"
#include "tailrisk/version.hpp"
