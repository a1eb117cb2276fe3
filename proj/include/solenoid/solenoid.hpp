#pragma once

// Umbrella header for the solenoid dimension library.

#include "solenoid/config.hpp"
#include "solenoid/error.hpp"
#include "solenoid/fractal.hpp"
#include "solenoid/linalg.hpp"
#include "solenoid/manifolds.hpp"
#include "solenoid/model.hpp"
#include "solenoid/parallel.hpp"
#include "solenoid/symbolic.hpp"
#include "solenoid/thermo.hpp"
#include "solenoid/transversality.hpp"
#include "solenoid/trig.hpp"

namespace solenoid {
inline constexpr const char* kVersion = "0.1.0";
}
