#pragma once

#include "geoframe/converter.hpp"
#include "geoframe/estimator.hpp"
#include "geoframe/frame.hpp"
#include "geoframe/multivector.hpp"
#include "geoframe/rotor.hpp"
#include "geoframe/signal.hpp"
