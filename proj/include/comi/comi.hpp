#pragma once

// Umbrella header for the change-of-measure inequality toolkit.

#include "comi/change_of_measure.hpp"
#include "comi/discrete.hpp"
#include "comi/divergences.hpp"
#include "comi/errors.hpp"
#include "comi/gaussian.hpp"
#include "comi/interval.hpp"
#include "comi/io.hpp"
#include "comi/mc_certify.hpp"
#include "comi/pac_bayes.hpp"
#include "comi/parallel.hpp"
#include "comi/quadrature.hpp"
#include "comi/rng.hpp"
#include "comi/sum.hpp"
#include "comi/sweep.hpp"
