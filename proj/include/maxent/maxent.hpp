#pragma once

#include "maxent/boltzmann.hpp"
#include "maxent/core.hpp"
#include "maxent/expfam.hpp"
#include "maxent/identities.hpp"
#include "maxent/projection.hpp"
#include "maxent/random.hpp"
#include "maxent/report.hpp"
#include "maxent/sanov.hpp"
