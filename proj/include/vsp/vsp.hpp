#pragma once

// Everything at once.

#include "vsp/agent_set.hpp"
#include "vsp/analysis.hpp"
#include "vsp/classify.hpp"
#include "vsp/config.hpp"
#include "vsp/dynamics.hpp"
#include "vsp/enumeration.hpp"
#include "vsp/errors.hpp"
#include "vsp/io.hpp"
#include "vsp/model.hpp"
#include "vsp/numeric.hpp"
#include "vsp/rng.hpp"
#include "vsp/state.hpp"
#include "vsp/theory.hpp"
