"""Inactive-region-aware video coding toolkit.

A from-scratch block codec plus geometry, metrics, and an experiment runner
for 360-degree projection formats whose packed frames contain inactive
pixels. The encoder can ignore inactive regions in rate-distortion
decisions, zero their residuals before the transform, and skip them when
collecting in-loop-filter statistics; bitstreams stay decodable without the
mask.
"""

from .codec import (
    BitstreamError,
    EncodeResult,
    EncoderConfig,
    ToolFlags,
    decode_sequence,
    dequantize,
    encode_sequence,
    entropy_decode_block,
    entropy_encode_block,
    forward_dct,
    intra_predict,
    inverse_dct,
    motion_search,
    quantize,
    zero_inactive_residual,
)
from .experiment import ExperimentSpec, ReportRow, run_sweep
from .frame_io import (
    ActivityMask,
    Frame420,
    FramePlane,
    read_mask_pgm,
    read_yuv420,
    subsample_mask_420,
    write_mask_pgm,
    write_yuv420,
)
from .geometry import (
    Projection,
    ProjectionFormat,
    SphereDirection,
    WeightMap,
    convert,
    dir_to_erp,
    erp_to_dir,
    generate_mask,
    ws_weights_erp,
)
from .metrics import (
    BdRateResult,
    RdPoint,
    bd_rate,
    masked_psnr,
    psnr,
    rate_kbps,
    ws_psnr_erp,
)
from .rdo import (
    DistortionKind,
    RdDecision,
    choose_mode,
    lambda_pred,
    lambda_ssd,
    masked_sad,
    masked_satd,
    masked_ssd,
    rd_cost,
    sad,
    satd,
    ssd,
)
from .sao import (
    SaoParams,
    SaoStats,
    apply_sao,
    choose_params,
    classify_eo,
    collect_stats,
)
from .synth import synthesize_sequence

__version__ = "0.1.0"
