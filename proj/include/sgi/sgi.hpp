#pragma once

#include "sgi/common.hpp"
#include "sgi/env.hpp"
#include "sgi/explore.hpp"
#include "sgi/generator.hpp"
#include "sgi/graph.hpp"
#include "sgi/grprop.hpp"
#include "sgi/harness.hpp"
#include "sgi/ilp.hpp"
#include "sgi/prior.hpp"
#include "sgi/task_io.hpp"
