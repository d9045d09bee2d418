"""Block-based codec: transforms, prediction, entropy coding, encode/decode."""

from .bitio import BitReader, BitstreamError, BitWriter
from .bitstream import SequenceHeader
from .decoder import decode_sequence
from .encoder import (
    EncodeResult,
    EncoderConfig,
    ToolFlags,
    effective_tools,
    encode_sequence,
)
from .entropy import block_bits, entropy_decode_block, entropy_encode_block, zigzag_order
from .predict import (
    INTRA_MODES,
    IntraRefs,
    gather_intra_refs,
    intra_predict,
    motion_search,
    predict_inter,
    refine_half_pel,
)
from .transform import (
    dequantize,
    forward_dct,
    inverse_dct,
    quant_step,
    quantize,
    reconstruct_block,
    zero_inactive_residual,
)

__all__ = [
    "BitReader",
    "BitstreamError",
    "BitWriter",
    "EncodeResult",
    "EncoderConfig",
    "INTRA_MODES",
    "IntraRefs",
    "SequenceHeader",
    "ToolFlags",
    "block_bits",
    "decode_sequence",
    "dequantize",
    "effective_tools",
    "encode_sequence",
    "entropy_decode_block",
    "entropy_encode_block",
    "forward_dct",
    "gather_intra_refs",
    "intra_predict",
    "inverse_dct",
    "motion_search",
    "predict_inter",
    "quant_step",
    "quantize",
    "reconstruct_block",
    "refine_half_pel",
    "zero_inactive_residual",
    "zigzag_order",
]
