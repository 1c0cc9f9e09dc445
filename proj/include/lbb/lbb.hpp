#pragma once

#include "lbb/beamforming.hpp"
#include "lbb/channel.hpp"
#include "lbb/errors.hpp"
#include "lbb/localization.hpp"
#include "lbb/model.hpp"
#include "lbb/montecarlo.hpp"
#include "lbb/optimize.hpp"
#include "lbb/rng.hpp"
#include "lbb/secrecy.hpp"
#include "lbb/version.hpp"
