#pragma once

#include "pbrsim/errors.hpp"
#include "pbrsim/tolerances.hpp"
#include "pbrsim/linalg.hpp"
#include "pbrsim/density_matrix.hpp"
#include "pbrsim/channels.hpp"
#include "pbrsim/calibration.hpp"
#include "pbrsim/circuit.hpp"
#include "pbrsim/noise.hpp"
#include "pbrsim/simulate.hpp"
#include "pbrsim/protocol.hpp"
#include "pbrsim/routing.hpp"
#include "pbrsim/bounds.hpp"
#include "pbrsim/stats.hpp"
#include "pbrsim/experiment.hpp"
