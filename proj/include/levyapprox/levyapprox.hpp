#pragma once

#include "levyapprox/chaos.hpp"
#include "levyapprox/chaos_build.hpp"
#include "levyapprox/common.hpp"
#include "levyapprox/error_functionals.hpp"
#include "levyapprox/levy_model.hpp"
#include "levyapprox/montecarlo.hpp"
#include "levyapprox/net_optimize.hpp"
#include "levyapprox/orthopoly.hpp"
#include "levyapprox/payoff.hpp"
#include "levyapprox/quadrature.hpp"
#include "levyapprox/rng.hpp"
#include "levyapprox/sampling.hpp"
#include "levyapprox/smoothness.hpp"
#include "levyapprox/time_net.hpp"
