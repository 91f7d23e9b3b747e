#pragma once

// Umbrella header.

#include "psgap/core.hpp"
#include "psgap/primes.hpp"
#include "psgap/primality.hpp"
#include "psgap/ps.hpp"
#include "psgap/characters.hpp"
#include "psgap/rankin.hpp"
#include "psgap/matrix.hpp"
#include "psgap/sieve.hpp"
#include "psgap/io.hpp"
