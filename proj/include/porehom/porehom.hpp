#pragma once

// Everything except the TOML layer (config.hpp), which pulls in toml++.

#include "porehom/effective.hpp"
#include "porehom/errors.hpp"
#include "porehom/geometry.hpp"
#include "porehom/io.hpp"
#include "porehom/log.hpp"
#include "porehom/phasefield.hpp"
#include "porehom/pipeline.hpp"
#include "porehom/porescale.hpp"
#include "porehom/stokescell.hpp"
#include "porehom/streamflow.hpp"
