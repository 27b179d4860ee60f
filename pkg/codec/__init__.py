"""
Пакет кодека груп кадрів: 3D вейвлет, сегментація окт-деревом та бітовий потік.
"""
from codec.wavelet import (
    ALPHA0,
    CodecError,
    CoeffBlock,
    GroupOfFrames,
    QuantSpec,
    bit_cost,
    distortion,
    dwt3_forward,
    dwt3_inverse,
    dequantize,
    lambda_of,
    quantize,
    read_raw_video,
    raw_video_bytes,
    write_raw_video,
)
from codec.octree import (
    Cuboid,
    FlowKind,
    FlowModel,
    SegmentationTree,
    best_flow,
    cuboid_cost,
    segment,
)
from codec.bitstream import BitstreamError, decode_gof, encode_gof, encode_segmentation
