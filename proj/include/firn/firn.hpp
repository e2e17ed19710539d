#pragma once

#include "firn/assembly.hpp"
#include "firn/banded.hpp"
#include "firn/data.hpp"
#include "firn/forward.hpp"
#include "firn/matrix.hpp"
#include "firn/mesh.hpp"
#include "firn/objective.hpp"
#include "firn/optimize.hpp"
#include "firn/params.hpp"
#include "firn/sensitivity.hpp"
#include "firn/tridiag.hpp"
