// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "fishtrack/assignment.hpp"
#include "fishtrack/geometry.hpp"
#include "fishtrack/io.hpp"
#include "fishtrack/losses.hpp"
#include "fishtrack/metrics.hpp"
#include "fishtrack/qtsi.hpp"
#include "fishtrack/simulator.hpp"
#include "fishtrack/tracker.hpp"
