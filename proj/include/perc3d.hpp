#pragma once

#include "perc3d/clusters.hpp"
#include "perc3d/confidence.hpp"
#include "perc3d/errors.hpp"
#include "perc3d/events.hpp"
#include "perc3d/exact.hpp"
#include "perc3d/lattice.hpp"
#include "perc3d/oracles.hpp"
#include "perc3d/rng.hpp"
#include "perc3d/runner.hpp"
#include "perc3d/threshold.hpp"
#include "perc3d/transfer_matrix.hpp"
#include "perc3d/upsilon.hpp"
