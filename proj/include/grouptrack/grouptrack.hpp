#pragma once

#include "grouptrack/assignment.hpp"
#include "grouptrack/errors.hpp"
#include "grouptrack/estimate.hpp"
#include "grouptrack/filter.hpp"
#include "grouptrack/gaussian.hpp"
#include "grouptrack/grouping.hpp"
#include "grouptrack/io.hpp"
#include "grouptrack/lmb.hpp"
#include "grouptrack/metrics.hpp"
#include "grouptrack/models.hpp"
#include "grouptrack/sim.hpp"
#include "grouptrack/types.hpp"
