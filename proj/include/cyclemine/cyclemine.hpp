#pragma once

// Umbrella header for the periodic-workflow mining library.

#include "core.hpp"
#include "datagen.hpp"
#include "dtw.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "miner.hpp"
#include "mta.hpp"
#include "period.hpp"
#include "rng.hpp"
#include "spectrum.hpp"
#include "stream.hpp"
#include "tokenizer.hpp"
