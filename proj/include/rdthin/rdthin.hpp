#pragma once

#include "rdthin/format.hpp"
#include "rdthin/harness.hpp"
#include "rdthin/initial_data.hpp"
#include "rdthin/kinetic.hpp"
#include "rdthin/measure.hpp"
#include "rdthin/metrics.hpp"
#include "rdthin/particle_system.hpp"
#include "rdthin/random.hpp"
#include "rdthin/rank_set.hpp"
#include "rdthin/stats.hpp"
#include "rdthin/thinning.hpp"
#include "rdthin/urn.hpp"
