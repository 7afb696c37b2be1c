#pragma once

#include "lmc/baseline.hpp"
#include "lmc/core.hpp"
#include "lmc/disjoint_set.hpp"
#include "lmc/expand.hpp"
#include "lmc/hungarian.hpp"
#include "lmc/landmark_clustering.hpp"
#include "lmc/metrics.hpp"
#include "lmc/oracle.hpp"
#include "lmc/reference.hpp"
#include "lmc/rng.hpp"
#include "lmc/selection.hpp"
#include "lmc/synthgen.hpp"
