#pragma once

#include "mvpr/errors.hpp"
#include "mvpr/math.hpp"
#include "mvpr/matrix.hpp"
#include "mvpr/model.hpp"
#include "mvpr/gibbs.hpp"
#include "mvpr/simulation.hpp"
#include "mvpr/summaries.hpp"
#include "mvpr/io.hpp"
