#pragma once

#include "fadingnet/rng.hpp"
#include "fadingnet/numeric.hpp"
#include "fadingnet/fading.hpp"
#include "fadingnet/network.hpp"
#include "fadingnet/decentralized.hpp"
#include "fadingnet/scaling.hpp"
#include "fadingnet/graph.hpp"
#include "fadingnet/centralized.hpp"
#include "fadingnet/experiments.hpp"
#include "fadingnet/selfcheck.hpp"
