#pragma once

// Umbrella header: the whole library.

#include "wordfence/checkpoint.hpp"
#include "wordfence/error.hpp"
#include "wordfence/evaluate.hpp"
#include "wordfence/extract.hpp"
#include "wordfence/fusion.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/io.hpp"
#include "wordfence/labelgen.hpp"
#include "wordfence/overlay.hpp"
#include "wordfence/pipeline.hpp"
#include "wordfence/rng.hpp"
#include "wordfence/synth.hpp"
#include "wordfence/toynet.hpp"
#include "wordfence/wsloss.hpp"
