#pragma once
// Umbrella header: exact spectral solvers for hierarchical (ultrametric)
// diffusion, the point-sink survival problem, closed-form log-periodic
// asymptotics, and brute-force finite-space oracles.

#include "hierarchy.hpp"
#include "tree.hpp"
#include "spectrum.hpp"
#include "diffusion.hpp"
#include "rng.hpp"
#include "gamma.hpp"
#include "talbot.hpp"
#include "sink.hpp"
#include "asymptotics.hpp"
#include "oracle.hpp"
