#pragma once

#include "ctsconf/conformal/cv_cp.hpp"
#include "ctsconf/conformal/enbpi.hpp"
#include "ctsconf/conformal/global_cp.hpp"
#include "ctsconf/conformal/mscp.hpp"
#include "ctsconf/conformal/parametric.hpp"
#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/quantile_regression.hpp"
#include "ctsconf/conformal/residuals.hpp"
#include "ctsconf/conformal/spci.hpp"
#include "ctsconf/conformal/types.hpp"
