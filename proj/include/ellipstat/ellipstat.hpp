#pragma once

#include "analytic.hpp"
#include "bem.hpp"
#include "circle_oracle.hpp"
#include "elliptic.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "legendre.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "report.hpp"
#include "spectral.hpp"
#include "tables.hpp"
