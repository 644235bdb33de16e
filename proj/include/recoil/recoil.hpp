#pragma once

// Numerics only; the CLI layer (config.hpp, io.hpp, cli.hpp) is separate.

#include "recoil/engines.hpp"
#include "recoil/errors.hpp"
#include "recoil/expm.hpp"
#include "recoil/ladder.hpp"
#include "recoil/multimode.hpp"
#include "recoil/observables.hpp"
#include "recoil/parallel.hpp"
#include "recoil/pinem.hpp"
#include "recoil/sweep.hpp"
#include "recoil/wavefunction.hpp"
