#pragma once

#include "curvest/charts.hpp"
#include "curvest/comparison.hpp"
#include "curvest/curvature.hpp"
#include "curvest/errors.hpp"
#include "curvest/finite_difference.hpp"
#include "curvest/harness.hpp"
#include "curvest/hyperdual.hpp"
#include "curvest/immersion.hpp"
#include "curvest/model_functions.hpp"
#include "curvest/operators.hpp"
#include "curvest/scenario.hpp"
#include "curvest/spaceform.hpp"
