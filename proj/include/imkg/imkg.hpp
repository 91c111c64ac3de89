#pragma once

#include "imkg/errors.hpp"
#include "imkg/format.hpp"
#include "imkg/hevi_stability.hpp"
#include "imkg/integrator.hpp"
#include "imkg/linear_stability.hpp"
#include "imkg/method_construction.hpp"
#include "imkg/order_conditions.hpp"
#include "imkg/polynomial.hpp"
#include "imkg/problems.hpp"
#include "imkg/registry.hpp"
#include "imkg/tableau.hpp"
#include "imkg/tableau_io.hpp"
