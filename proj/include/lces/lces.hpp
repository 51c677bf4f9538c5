#pragma once

// Umbrella header for the constrained (1,lambda) evolution strategy
// simulator: linear objective, linear constraint handled by resampling,
// general absolutely continuous step distributions, exact step densities,
// the normalized-distance Markov chain and its long-run diagnostics.

#include "lces/analysis.hpp"
#include "lces/config.hpp"
#include "lces/copula.hpp"
#include "lces/copula_path.hpp"
#include "lces/distribution.hpp"
#include "lces/es.hpp"
#include "lces/experiment.hpp"
#include "lces/marginals.hpp"
#include "lces/problem.hpp"
#include "lces/quadrature.hpp"
#include "lces/rng.hpp"
#include "lces/specfun.hpp"
#include "lces/stats.hpp"
