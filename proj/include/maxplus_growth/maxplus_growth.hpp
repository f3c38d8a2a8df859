#pragma once

#include "maxplus_growth/analytic.hpp"
#include "maxplus_growth/cross_check.hpp"
#include "maxplus_growth/fixed_point.hpp"
#include "maxplus_growth/monte_carlo.hpp"
#include "maxplus_growth/quadrature.hpp"
#include "maxplus_growth/tropical.hpp"
#include "maxplus_growth/version.hpp"
