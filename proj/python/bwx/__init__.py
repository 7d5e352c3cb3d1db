# Copyright 2026 The bwx authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

"""Streaming causal U-Net runtime for speech bandwidth extension."""

from bwx._core import (  # noqa: F401
    BandSampler,
    DiscriminatorOutput,
    GraphSpec,
    StreamExecutor,
    StreamState,
    WeightStore,
    avg_downsample,
    band_preset,
    bandpass,
    build_discriminator,
    build_generator,
    count_params,
    discriminator_loss,
    down_stride_product,
    feature_loss,
    generator_adv_loss,
    init_multi_scale_weights,
    init_weights,
    load_weights,
    run_discriminator,
    run_generator,
    save_weights,
    si_sdr,
    stft_mag,
    total_generator_loss,
    up_stride_product,
    validate_graph,
    wav_read,
    wav_write,
)

__version__ = "0.1.0"
