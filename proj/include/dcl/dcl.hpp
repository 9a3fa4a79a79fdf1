#pragma once

#include "dcl/error.hpp"
#include "dcl/dyadic.hpp"
#include "dcl/grid_function.hpp"
#include "dcl/shift.hpp"
#include "dcl/operator.hpp"
#include "dcl/kernel.hpp"
#include "dcl/bmo.hpp"
#include "dcl/commutator.hpp"
#include "dcl/random.hpp"
#include "dcl/io.hpp"
#include "dcl/report.hpp"
#include "dcl/suite.hpp"
