// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "emma/objective.hpp"

namespace emma::detail {

/// Largest gradient norm applied in one descent step; longer gradients are
/// rescaled to this length.
inline constexpr double kGradientClipNorm = 5.0;

/// model -= lr * clip(gradient). Returns the unclipped gradient norm.
double gradient_step(ToyModel& model, const ToyModel& gradient, double learning_rate);

/// a += scale * b, parameter by parameter.
void accumulate(ToyModel& a, const ToyModel& b, double scale);

}  // namespace emma::detail
