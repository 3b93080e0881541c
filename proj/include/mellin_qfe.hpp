#pragma once

#include "mellin_qfe/adaptive.hpp"
#include "mellin_qfe/density.hpp"
#include "mellin_qfe/errors.hpp"
#include "mellin_qfe/estimator.hpp"
#include "mellin_qfe/mellin.hpp"
#include "mellin_qfe/quad.hpp"
#include "mellin_qfe/rng.hpp"
#include "mellin_qfe/sample.hpp"
#include "mellin_qfe/simkit.hpp"
