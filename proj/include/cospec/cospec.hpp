#pragma once

#include "cospec/errors.hpp"
#include "cospec/rng.hpp"
#include "cospec/group.hpp"
#include "cospec/stallings.hpp"
#include "cospec/oracle.hpp"
#include "cospec/ball.hpp"
#include "cospec/power_iteration.hpp"
#include "cospec/spectral.hpp"
#include "cospec/schreier.hpp"
#include "cospec/graphing.hpp"
#include "cospec/irs.hpp"
#include "cospec/harness.hpp"
