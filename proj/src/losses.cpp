// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/losses.hpp"

#include <algorithm>
#include <cmath>

namespace bwx {

namespace {

double hinge_mean(const std::vector<float>& logits, double sign) {
  double acc = 0.0;
  for (float v : logits) acc += std::max(0.0, 1.0 + sign * v);
  return logits.empty() ? 0.0 : acc / static_cast<double>(logits.size());
}

void check_scales(const DiscriminatorOutput& a, const DiscriminatorOutput& b) {
  if (a.logits.size() != b.logits.size()) throw ShapeError("loss: scale count mismatch");
  for (std::size_t k = 0; k < a.logits.size(); ++k) {
    if (a.logits[k].size() != b.logits[k].size()) throw ShapeError("loss: logit length mismatch");
  }
}

}  // namespace

double discriminator_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake) {
  check_scales(real, fake);
  const std::size_t K = real.logits.size();
  double real_term = 0.0, fake_term = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    real_term += hinge_mean(real.logits[k], -1.0);
    fake_term += hinge_mean(fake.logits[k], +1.0);
  }
  return (real_term + fake_term) / static_cast<double>(K);
}

double generator_adv_loss(const DiscriminatorOutput& fake) {
  const std::size_t K = fake.logits.size();
  if (K == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) acc += hinge_mean(fake.logits[k], -1.0);
  return acc / static_cast<double>(K);
}

double feature_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake) {
  if (real.features.size() != fake.features.size()) throw ShapeError("loss: scale count mismatch");
  const std::size_t K = real.features.size();
  double acc = 0.0;
  std::size_t terms = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (real.features[k].size() != fake.features[k].size()) {
      throw ShapeError("loss: feature layer count mismatch");
    }
    for (std::size_t l = 0; l < real.features[k].size(); ++l) {
      const FeatureMap& a = real.features[k][l];
      const FeatureMap& b = fake.features[k][l];
      if (a.channels() != b.channels() || a.length() != b.length()) {
        throw ShapeError("loss: feature shape mismatch");
      }
      double layer_acc = 0.0;
      const std::span<const float> av = a.flat(), bv = b.flat();
      for (std::size_t i = 0; i < av.size(); ++i) {
        layer_acc += std::abs(static_cast<double>(av[i]) - static_cast<double>(bv[i]));
      }
      // Per-layer term: mean over channels and time.
      acc += av.empty() ? 0.0 : layer_acc / static_cast<double>(av.size());
      ++terms;
    }
  }
  return terms == 0 ? 0.0 : acc / static_cast<double>(terms);
}

LossBreakdown total_generator_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake,
                                   const LossConfig& cfg) {
  LossBreakdown b;
  b.d_loss = discriminator_loss(real, fake);
  b.g_adv = generator_adv_loss(fake);
  b.g_rec = feature_loss(real, fake);
  b.g_total = b.g_adv + cfg.rec_weight * b.g_rec;
  return b;
}

double si_sdr(const AudioBuffer& estimate, const AudioBuffer& reference) {
  if (estimate.size() != reference.size()) throw ShapeError("si_sdr: length mismatch");
  if (estimate.size() == 0) throw DomainError("si_sdr: empty signals");

  double dot = 0.0, ref_energy = 0.0;
  for (std::int64_t i = 0; i < reference.size(); ++i) {
    const double e = estimate.samples[i];
    const double r = reference.samples[i];
    dot += e * r;
    ref_energy += r * r;
  }
  if (ref_energy == 0.0) throw DomainError("si_sdr: reference is all-zero");

  const double alpha = dot / ref_energy;
  double target = 0.0, residual = 0.0;
  for (std::int64_t i = 0; i < reference.size(); ++i) {
    const double t = alpha * reference.samples[i];
    const double d = t - estimate.samples[i];
    target += t * t;
    residual += d * d;
  }
  if (residual <= 1e-12 * target) return 100.0;
  if (target <= 1e-12 * residual) return -100.0;
  return 10.0 * std::log10(target / residual);
}

}  // namespace bwx
