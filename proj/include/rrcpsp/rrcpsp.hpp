#pragma once

#include "rrcpsp/adversary.hpp"
#include "rrcpsp/bench.hpp"
#include "rrcpsp/bnb.hpp"
#include "rrcpsp/bridge.hpp"
#include "rrcpsp/counterexample.hpp"
#include "rrcpsp/generator.hpp"
#include "rrcpsp/heuristics.hpp"
#include "rrcpsp/instance.hpp"
#include "rrcpsp/lp_format.hpp"
#include "rrcpsp/milp.hpp"
#include "rrcpsp/network.hpp"
#include "rrcpsp/psplib.hpp"
