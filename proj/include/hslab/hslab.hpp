#pragma once

// Umbrella header: the full laboratory in one include.

#include "hslab/angles.hpp"
#include "hslab/brown.hpp"
#include "hslab/cli.hpp"
#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/hs_projection.hpp"
#include "hslab/io.hpp"
#include "hslab/models.hpp"
#include "hslab/parallel.hpp"
#include "hslab/planner.hpp"
#include "hslab/region.hpp"
#include "hslab/region_parse.hpp"
#include "hslab/rng.hpp"
#include "hslab/schur.hpp"
#include "hslab/spectral_measure.hpp"
#include "hslab/subspace.hpp"
#include "hslab/tolerance.hpp"
