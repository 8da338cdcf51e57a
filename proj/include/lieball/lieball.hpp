#pragma once

#include "complex_geometry.hpp"
#include "errors.hpp"
#include "function_spec.hpp"
#include "harmonic_basis.hpp"
#include "holo_continuation.hpp"
#include "lf_transform.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"
#include "random.hpp"
#include "special_functions.hpp"
#include "sphere_integration.hpp"
#include "verification.hpp"
