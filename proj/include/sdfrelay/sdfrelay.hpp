#pragma once

#include "sdfrelay/types.hpp"
#include "sdfrelay/geometry.hpp"
#include "sdfrelay/quadrature.hpp"
#include "sdfrelay/analytic.hpp"
#include "sdfrelay/montecarlo.hpp"
#include "sdfrelay/bounds.hpp"
#include "sdfrelay/diversity.hpp"
#include "sdfrelay/optimizer.hpp"
