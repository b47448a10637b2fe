// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "spadfab/arrivals.hpp"
#include "spadfab/array.hpp"
#include "spadfab/combinator.hpp"
#include "spadfab/config.hpp"
#include "spadfab/edge_stream.hpp"
#include "spadfab/errors.hpp"
#include "spadfab/event_engine.hpp"
#include "spadfab/fabric.hpp"
#include "spadfab/lut.hpp"
#include "spadfab/rational.hpp"
#include "spadfab/readout.hpp"
#include "spadfab/rng.hpp"
#include "spadfab/scenarios.hpp"
#include "spadfab/spad.hpp"
#include "spadfab/spec_parser.hpp"
