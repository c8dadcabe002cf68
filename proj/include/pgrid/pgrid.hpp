// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "config.hpp"
#include "core.hpp"
#include "finite.hpp"
#include "grid.hpp"
#include "laplace.hpp"
#include "link_metrics.hpp"
#include "moments.hpp"
#include "montecarlo.hpp"
#include "random.hpp"
#include "series.hpp"

namespace pgrid {
inline constexpr const char* kVersion = "0.1.0";
}
