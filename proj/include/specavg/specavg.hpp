#pragma once

#include "specavg/averaging.hpp"
#include "specavg/config.hpp"
#include "specavg/csv.hpp"
#include "specavg/error.hpp"
#include "specavg/experiments.hpp"
#include "specavg/grid.hpp"
#include "specavg/spectrum.hpp"
#include "specavg/statistics.hpp"
#include "specavg/theory.hpp"
