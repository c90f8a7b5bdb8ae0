#pragma once

#include "latwave/coeffs.hpp"
#include "latwave/config.hpp"
#include "latwave/csv.hpp"
#include "latwave/errors.hpp"
#include "latwave/floquet.hpp"
#include "latwave/golden.hpp"
#include "latwave/lattice.hpp"
#include "latwave/metrics.hpp"
#include "latwave/svg.hpp"
#include "latwave/util.hpp"
#include "latwave/waves_periodic.hpp"
#include "latwave/waves_timehet.hpp"
