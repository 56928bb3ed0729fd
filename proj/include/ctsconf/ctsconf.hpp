#pragma once

#include "ctsconf/bench/config.hpp"
#include "ctsconf/bench/report.hpp"
#include "ctsconf/bench/runner.hpp"
#include "ctsconf/bench/synthetic.hpp"
#include "ctsconf/conformal.hpp"
#include "ctsconf/error.hpp"
#include "ctsconf/forecaster.hpp"
#include "ctsconf/metrics.hpp"
#include "ctsconf/online/aci.hpp"
#include "ctsconf/online/acmcp.hpp"
#include "ctsconf/series.hpp"
#include "ctsconf/stattest/rank_tests.hpp"
#include "ctsconf/stattest/special_functions.hpp"
