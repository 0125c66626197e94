// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stam/core/error.hpp"
#include "stam/core/gradcheck.hpp"
#include "stam/core/graph.hpp"
#include "stam/core/rng.hpp"
#include "stam/core/shape.hpp"
#include "stam/core/tensor.hpp"
#include "stam/data/csv.hpp"
#include "stam/data/scaler.hpp"
#include "stam/data/synth.hpp"
#include "stam/data/windows.hpp"
#include "stam/interpret/report.hpp"
#include "stam/layers/dense.hpp"
#include "stam/layers/dropout.hpp"
#include "stam/layers/lstm.hpp"
#include "stam/models/attention.hpp"
#include "stam/models/baselines.hpp"
#include "stam/models/config.hpp"
#include "stam/models/costs.hpp"
#include "stam/models/encoder.hpp"
#include "stam/models/factory.hpp"
#include "stam/models/model.hpp"
#include "stam/models/serialize.hpp"
#include "stam/models/stam.hpp"
#include "stam/train/adam.hpp"
#include "stam/train/evaluate.hpp"
#include "stam/train/fit.hpp"
#include "stam/train/loss.hpp"
#include "stam/train/metrics.hpp"
