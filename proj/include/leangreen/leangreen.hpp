#pragma once

#include "leangreen/calibration.hpp"
#include "leangreen/config_io.hpp"
#include "leangreen/distribution.hpp"
#include "leangreen/energy.hpp"
#include "leangreen/error.hpp"
#include "leangreen/event_calendar.hpp"
#include "leangreen/evsm.hpp"
#include "leangreen/line_model.hpp"
#include "leangreen/metrics.hpp"
#include "leangreen/random_stream.hpp"
#include "leangreen/report.hpp"
#include "leangreen/scenario.hpp"
#include "leangreen/simulator.hpp"
#include "leangreen/statistics.hpp"
#include "leangreen/types.hpp"
