#pragma once

#include "color.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "geometry.hpp"
#include "localization.hpp"
#include "netsim.hpp"
#include "random.hpp"
