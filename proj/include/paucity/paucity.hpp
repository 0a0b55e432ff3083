#pragma once

#include "paucity/cache.hpp"
#include "paucity/cascade.hpp"
#include "paucity/core.hpp"
#include "paucity/enumeration.hpp"
#include "paucity/exponents.hpp"
#include "paucity/linalg.hpp"
#include "paucity/polynomials.hpp"
#include "paucity/systems.hpp"
