"""Wide-canvas latent generation toolkit.

The heavy lifting lives in the native module; this package re-exports
its public surface.
"""

from scrollgen._core import (
    ConfigError,
    DimensionError,
    IoError,
    Layout,
    PromptParseError,
    SchemaError,
    ToyDenoiser,
    ToyEmbedder,
    WindowRect,
    build_prompt,
    canvas_to_png,
    edge_matrix,
    fuse_step,
    generate,
    metric_report,
    parse_weighted_prompt,
    plan_windows,
    predict_layout_fixture,
    read_image,
    read_tensor,
    region_of,
    stride_for_step,
    write_tensor,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "IoError",
    "Layout",
    "PromptParseError",
    "SchemaError",
    "ToyDenoiser",
    "ToyEmbedder",
    "WindowRect",
    "build_prompt",
    "canvas_to_png",
    "edge_matrix",
    "fuse_step",
    "generate",
    "metric_report",
    "parse_weighted_prompt",
    "plan_windows",
    "predict_layout_fixture",
    "read_image",
    "read_tensor",
    "region_of",
    "stride_for_step",
    "write_tensor",
]
