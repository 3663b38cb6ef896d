"""Two-stage selective-averaging LDPC decoding with standard and averaging baselines."""

from .averaging import (
    SelectionState,
    averaging_transform,
    full_averaging_decode,
    full_averaging_transform,
    select_nodes,
    selective_decode,
)
from .bp import DecodeOutcome, DecoderConfig, MessageState, decode, decode_batch
from .channel import ChannelConfig, transmit
from .code_model import TannerGraph, is_codeword, load_alist, make_regular_code, save_alist, syndrome
from .two_stage import SecondStagePlan, apply_plan, build_plan, two_stage_decode

__version__ = "0.1.0"
