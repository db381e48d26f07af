#pragma once

#include "screenline/coercivity.hpp"
#include "screenline/diagnostics.hpp"
#include "screenline/errors.hpp"
#include "screenline/ext_real.hpp"
#include "screenline/families.hpp"
#include "screenline/feasibility.hpp"
#include "screenline/improvement.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"
#include "screenline/solvers.hpp"
