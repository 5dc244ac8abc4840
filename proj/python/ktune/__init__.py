"""Python bindings for the ktune autotuning core."""

from ._ktune import (
    ConfigSpace,
    EvalError,
    KtuneError,
    ParseError,
    SearchError,
    __version__,
    asm_stats,
    load_space,
    normalize,
    parse_asm,
    parse_space,
    relative_cdf,
    synthetic_latency,
    tune_synthetic,
)

__all__ = [
    "ConfigSpace",
    "EvalError",
    "KtuneError",
    "ParseError",
    "SearchError",
    "__version__",
    "asm_stats",
    "load_space",
    "normalize",
    "parse_asm",
    "parse_space",
    "relative_cdf",
    "synthetic_latency",
    "tune_synthetic",
]
