#pragma once

#include "domain.hpp"
#include "errors.hpp"
#include "jordan.hpp"
#include "matrix.hpp"
#include "metric.hpp"
#include "models.hpp"
#include "pseudospec.hpp"
#include "spectral.hpp"
