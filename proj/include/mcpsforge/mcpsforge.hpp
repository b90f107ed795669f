#pragma once

// Umbrella header: pipeline composition as WA-WF Petri nets, CASH search
// over the NEW/FULL spaces with random search, TPE and a SMAC-style
// forest, plus the post-hoc similarity/clustering/bootstrap analyses.

#include "mcpsforge/analyze.hpp"
#include "mcpsforge/archive.hpp"
#include "mcpsforge/cli.hpp"
#include "mcpsforge/component_ops.hpp"
#include "mcpsforge/dataset.hpp"
#include "mcpsforge/evaluate.hpp"
#include "mcpsforge/execute.hpp"
#include "mcpsforge/optimize.hpp"
#include "mcpsforge/petri.hpp"
#include "mcpsforge/smac.hpp"
#include "mcpsforge/space.hpp"
#include "mcpsforge/tpe.hpp"
