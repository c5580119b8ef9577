#pragma once

#include "drgraph/alias_table.hpp"
#include "drgraph/errors.hpp"
#include "drgraph/graph.hpp"
#include "drgraph/layout.hpp"
#include "drgraph/metrics.hpp"
#include "drgraph/multilevel.hpp"
#include "drgraph/optimizer.hpp"
#include "drgraph/similarity.hpp"
