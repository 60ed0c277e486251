#pragma once

// Spectral stability toolkit for random operators on regular rooted trees:
// ratio recursions and their population dynamics, quantile-width functionals,
// metric-graph transfer, and a one-channel scattering probe.

#include "config.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "gamma_pool.hpp"
#include "green_recursion.hpp"
#include "output.hpp"
#include "quantum_graph.hpp"
#include "resolvent.hpp"
#include "rng.hpp"
#include "scattering.hpp"
#include "spectral_stats.hpp"
#include "tree_model.hpp"
#include "verify.hpp"
