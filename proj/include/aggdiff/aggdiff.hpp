#ifndef AGGDIFF_AGGDIFF_HPP
#define AGGDIFF_AGGDIFF_HPP

/// Umbrella header for the aggregation-diffusion laboratory.

#include "aggdiff/check.hpp"
#include "aggdiff/config.hpp"
#include "aggdiff/convolve.hpp"
#include "aggdiff/diagnostics.hpp"
#include "aggdiff/errors.hpp"
#include "aggdiff/experiment.hpp"
#include "aggdiff/field_ops.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/kernel.hpp"
#include "aggdiff/numerics.hpp"
#include "aggdiff/profiles.hpp"
#include "aggdiff/solver.hpp"
#include "aggdiff/tridiagonal.hpp"

#endif
