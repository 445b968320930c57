#pragma once

#include "nessent/errors.hpp"
#include "nessent/numerics/matrix.hpp"
#include "nessent/numerics/eigen.hpp"
#include "nessent/numerics/quadrature.hpp"
#include "nessent/scattering.hpp"
#include "nessent/correlation.hpp"
#include "nessent/entanglement.hpp"
#include "nessent/asymptotics.hpp"
#include "nessent/experiment/config.hpp"
#include "nessent/experiment/csv.hpp"
#include "nessent/experiment/fit.hpp"
#include "nessent/experiment/pool.hpp"
#include "nessent/experiment/sweeps.hpp"
#include "nessent/experiment/selftest.hpp"
