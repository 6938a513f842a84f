#pragma once

#include "gravdiff/constants.hpp"
#include "gravdiff/core_model.hpp"
#include "gravdiff/covariance_dynamics.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/feasibility.hpp"
#include "gravdiff/langevin_mc.hpp"
#include "gravdiff/linalg.hpp"
#include "gravdiff/separability_bounds.hpp"
#include "gravdiff/spectra.hpp"
#include "gravdiff/welch.hpp"
