#pragma once

#include "pspline/error.hpp"
#include "pspline/random.hpp"
#include "pspline/spectral.hpp"
#include "pspline/rkhs.hpp"
#include "pspline/solvers.hpp"
#include "pspline/stochastic.hpp"
#include "pspline/harness.hpp"
#include "pspline/io.hpp"
