#ifndef ONEBIT_ONEBIT_HPP
#define ONEBIT_ONEBIT_HPP

#include "circulant.hpp"
#include "diagnostics.hpp"
#include "fft.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "quantize.hpp"
#include "recover.hpp"
#include "rng.hpp"

#endif  // ONEBIT_ONEBIT_HPP
