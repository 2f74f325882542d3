#pragma once

// Umbrella for the simulation library. The CLI layer (config.hpp, cli.hpp)
// is not pulled in here since it drags in serialization dependencies.
#include "linamp/amplifier.hpp"
#include "linamp/gaussian_state.hpp"
#include "linamp/measurement.hpp"
#include "linamp/metrics.hpp"
#include "linamp/rng.hpp"
#include "linamp/spectrum.hpp"
#include "linamp/symplectic.hpp"
