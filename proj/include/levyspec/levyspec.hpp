#pragma once

#include "levyspec/bernstein.hpp"
#include "levyspec/common.hpp"
#include "levyspec/grid.hpp"
#include "levyspec/measures.hpp"
#include "levyspec/model_io.hpp"
#include "levyspec/montecarlo.hpp"
#include "levyspec/operators.hpp"
#include "levyspec/quadrature.hpp"
#include "levyspec/spectrum.hpp"
#include "levyspec/symbol.hpp"
