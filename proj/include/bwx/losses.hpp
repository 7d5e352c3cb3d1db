// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "bwx/executor.hpp"

namespace bwx {

struct LossConfig {
  double rec_weight = 100.0;  // weighting of the feature (reconstruction) loss
  int num_scales = 3;
  int num_feature_layers = 6;
};

struct LossBreakdown {
  double d_loss = 0.0;
  double g_adv = 0.0;
  double g_rec = 0.0;
  double g_total = 0.0;
};

// Hinge loss of the discriminator against real/generated logits:
// mean over scales of the per-scale mean of
// max(0, 1 - D(real)) + max(0, 1 + D(fake)).
double discriminator_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake);

// Generator-side hinge: mean over scales and logits of max(0, 1 - D(fake)).
double generator_adv_loss(const DiscriminatorOutput& fake);

// Feature-matching loss: mean absolute difference between internal
// discriminator activations for the real and generated signals, averaged over
// channels and time per layer, then over layers and scales.
double feature_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake);

// Composes the above; g_total = g_adv + rec_weight * g_rec.
LossBreakdown total_generator_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake,
                                   const LossConfig& cfg = {});

// Scale-invariant signal-to-distortion ratio in dB. With
// a = <est, ref>/||ref||^2 the result is 10*log10(||a*ref||^2 /
// ||a*ref - est||^2), capped to [-100, 100] when either energy term vanishes
// relative to the other (identical signals report the +100 dB cap).
double si_sdr(const AudioBuffer& estimate, const AudioBuffer& reference);

}  // namespace bwx
