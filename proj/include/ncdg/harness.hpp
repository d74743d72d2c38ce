#pragma once

// Benchmark harness: configs, case runners, CSV output, rate fits, timing
// tables.

#include "ncdg/harness/config.hpp"
#include "ncdg/harness/csv.hpp"
#include "ncdg/harness/rates.hpp"
#include "ncdg/harness/runs.hpp"
#include "ncdg/harness/timing.hpp"
