#pragma once

#include "ksr/configuration.hpp"
#include "ksr/eisenstein.hpp"
#include "ksr/phases.hpp"
#include "ksr/quad_real.hpp"
#include "ksr/valuations.hpp"
#include "ksr/vectors.hpp"
#include "ksr/commands.hpp"
