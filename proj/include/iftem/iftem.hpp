#pragma once

#include "iftem/bench.hpp"
#include "iftem/encoder.hpp"
#include "iftem/errors.hpp"
#include "iftem/io.hpp"
#include "iftem/kernel.hpp"
#include "iftem/model.hpp"
#include "iftem/pulse.hpp"
#include "iftem/recovery.hpp"
#include "iftem/rng.hpp"
