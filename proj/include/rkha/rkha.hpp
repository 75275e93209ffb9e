#pragma once

// Umbrella header for the RKHA toolkit.

#include "rkha/errors.hpp"
#include "rkha/fft.hpp"
#include "rkha/io.hpp"
#include "rkha/lattice.hpp"
#include "rkha/linalg.hpp"
#include "rkha/oracles.hpp"
#include "rkha/sampled_kernel.hpp"
#include "rkha/spectral.hpp"
#include "rkha/suite.hpp"
#include "rkha/util.hpp"
#include "rkha/weights.hpp"
