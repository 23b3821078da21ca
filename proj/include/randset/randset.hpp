#pragma once

// Umbrella header.

#include "randset/error.hpp"
#include "randset/io.hpp"
#include "randset/measure_space.hpp"
#include "randset/random_set.hpp"
#include "randset/rng.hpp"
#include "randset/stability.hpp"
#include "randset/two_sample.hpp"
