// Naive reference interpreter for unprivatized plans: nested-loop joins,
// ordered-map grouping, no sharing with the engine's operators.
#pragma once

#include "pac/engine.hpp"

namespace pactest {

pac::Relation ReferenceRun(const pac::PlanPtr &normalized, const pac::Database &db);

}
