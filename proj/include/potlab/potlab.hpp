#pragma once

#include "potlab/game.hpp"
#include "potlab/random.hpp"
#include "potlab/hodge.hpp"
#include "potlab/operator_cache.hpp"
#include "potlab/dynamics.hpp"
#include "potlab/econ.hpp"
#include "potlab/bayesian.hpp"
#include "potlab/io.hpp"
#include "potlab/harness.hpp"
