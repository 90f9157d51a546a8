#pragma once

#include "geodec/core.hpp"
#include "geodec/bath.hpp"
#include "geodec/models.hpp"
#include "geodec/dynamics.hpp"
#include "geodec/unwrap.hpp"
#include "geodec/geomphase.hpp"
#include "geodec/ensemble.hpp"
#include "geodec/closedform.hpp"
#include "geodec/control.hpp"
#include "geodec/config.hpp"
#include "geodec/csv.hpp"
#include "geodec/experiments.hpp"
