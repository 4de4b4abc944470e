#pragma once

#include "scarkit/boundary.hpp"
#include "scarkit/canonical.hpp"
#include "scarkit/dynamics.hpp"
#include "scarkit/errors.hpp"
#include "scarkit/fit.hpp"
#include "scarkit/mps.hpp"
#include "scarkit/nullspace.hpp"
#include "scarkit/opspace.hpp"
#include "scarkit/scars.hpp"
#include "scarkit/states.hpp"
#include "scarkit/version.hpp"
