#pragma once

#include "mrp/errors.hpp"
#include "mrp/linalg.hpp"
#include "mrp/series.hpp"
#include "mrp/criteria.hpp"
#include "mrp/problem.hpp"
#include "mrp/gevp.hpp"
#include "mrp/gtrs.hpp"
#include "mrp/mm.hpp"
#include "mrp/design.hpp"
#include "mrp/cointsim.hpp"
#include "mrp/trading.hpp"
#include "mrp/dataio.hpp"
#include "mrp/cli.hpp"
