#pragma once

#include "parti/core_math.hpp"
#include "parti/closed_forms.hpp"
#include "parti/quadrature.hpp"
#include "parti/valuation.hpp"
#include "parti/bankruptcy_solver.hpp"
#include "parti/optimizer.hpp"
#include "parti/analysis.hpp"
#include "parti/mc_oracle.hpp"
#include "parti/validation.hpp"
#include "parti/reproduction.hpp"
#include "parti/config.hpp"
#include "parti/csv.hpp"
