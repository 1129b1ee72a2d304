#pragma once

// Umbrella header: the whole coupling-coordination toolkit.

#include "ccdm/errors.hpp"
#include "ccdm/scheme.hpp"
#include "ccdm/panel.hpp"
#include "ccdm/normalize.hpp"
#include "ccdm/weighting.hpp"
#include "ccdm/scoring.hpp"
#include "ccdm/coupling.hpp"
#include "ccdm/report.hpp"
#include "ccdm/pipeline.hpp"
