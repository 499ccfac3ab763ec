#pragma once

#define LATDIR_VERSION "0.1.0"

#include "latdir/constants.hpp"
#include "latdir/diophantine.hpp"
#include "latdir/errors.hpp"
#include "latdir/escape_mass.hpp"
#include "latdir/lattice_core.hpp"
#include "latdir/lattice_walk.hpp"
#include "latdir/limit_process.hpp"
#include "latdir/linalg.hpp"
#include "latdir/parallel.hpp"
#include "latdir/rng.hpp"
#include "latdir/stats.hpp"
