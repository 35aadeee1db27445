#pragma once

// Umbrella header. Individual modules can be included on their own;
// serialize.hpp and scenarios.hpp additionally need the vendored json
// header on the include path, so they are left out here.

#include "rvdet/certify.hpp"
#include "rvdet/curves.hpp"
#include "rvdet/distributions.hpp"
#include "rvdet/lgamma.hpp"
#include "rvdet/measures.hpp"
#include "rvdet/mellin.hpp"
#include "rvdet/numerics.hpp"
#include "rvdet/rng.hpp"
#include "rvdet/simulate.hpp"
