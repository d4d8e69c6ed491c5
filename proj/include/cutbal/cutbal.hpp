#pragma once

// Umbrella header pulling in the whole library.

#include "cutbal/balance.hpp"
#include "cutbal/catalog.hpp"
#include "cutbal/discrete.hpp"
#include "cutbal/driver.hpp"
#include "cutbal/errors.hpp"
#include "cutbal/graph.hpp"
#include "cutbal/integrate.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/report.hpp"
#include "cutbal/rng.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/schedule.hpp"
#include "cutbal/sorting.hpp"
#include "cutbal/suites.hpp"
#include "cutbal/trajectory.hpp"
