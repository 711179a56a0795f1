#pragma once

#include "sprec/core.hpp"
#include "sprec/norms.hpp"
#include "sprec/linalg.hpp"
#include "sprec/frontend.hpp"
#include "sprec/waveforms.hpp"
#include "sprec/precoders.hpp"
#include "sprec/rng.hpp"
#include "sprec/simulation.hpp"
#include "sprec/config.hpp"
#include "sprec/io.hpp"
