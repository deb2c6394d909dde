#pragma once

#include "rational.hpp"
#include "geometry.hpp"
#include "arithmetic.hpp"
#include "counting.hpp"
#include "special.hpp"
#include "mainterm.hpp"
#include "psi.hpp"
#include "expsum.hpp"
#include "sweep.hpp"

#ifndef TORUS_LATTICE_VERSION
#define TORUS_LATTICE_VERSION "0.1.0"
#endif
