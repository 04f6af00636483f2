#pragma once

// Umbrella header.
#include "wso/scalar.hpp"
#include "wso/matrix.hpp"
#include "wso/subspace.hpp"
#include "wso/polynomial.hpp"
#include "wso/rational_function.hpp"
#include "wso/tableau.hpp"
#include "wso/tableau_io.hpp"
#include "wso/rooted_trees.hpp"
#include "wso/order.hpp"
#include "wso/minpoly.hpp"
#include "wso/stability.hpp"
#include "wso/barriers.hpp"
#include "wso/construct.hpp"
#include "wso/ivp.hpp"
#include "wso/catalog.hpp"
#include "wso/report.hpp"
