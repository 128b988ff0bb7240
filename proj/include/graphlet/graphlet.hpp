#ifndef GRAPHLET_GRAPHLET_HPP
#define GRAPHLET_GRAPHLET_HPP

#include "graphlet/benchmark.hpp"
#include "graphlet/errors.hpp"
#include "graphlet/graph_construction.hpp"
#include "graphlet/graph_core.hpp"
#include "graphlet/io.hpp"
#include "graphlet/kernels.hpp"
#include "graphlet/pipeline.hpp"
#include "graphlet/rng.hpp"
#include "graphlet/sgwt.hpp"
#include "graphlet/synth.hpp"

#endif  // GRAPHLET_GRAPHLET_HPP
