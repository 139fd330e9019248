#pragma once
// Umbrella header: the whole library in one include.

#include "galvin/construct.hpp"
#include "galvin/errors.hpp"
#include "galvin/family.hpp"
#include "galvin/io.hpp"
#include "galvin/layout.hpp"
#include "galvin/mask.hpp"
#include "galvin/numerics.hpp"
#include "galvin/parallel.hpp"
#include "galvin/rng.hpp"
#include "galvin/selftest.hpp"
#include "galvin/verify.hpp"
