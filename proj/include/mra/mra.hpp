#pragma once

// Umbrella header: the whole simulation laboratory in one include.

#include "attractor.hpp"
#include "brownian.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "forcing.hpp"
#include "integrate.hpp"
#include "manifest.hpp"
#include "model.hpp"
#include "plot.hpp"
#include "presets.hpp"
#include "spectral.hpp"
