"""Retinal image preprocessing: fuzzy denoising, nonlinear diffusion, and
adaptive variable-distance speckle (AVDS) contrast enhancement.

The heavy per-pixel kernels run through a compiled extension when it is
available and fall back to pure NumPy otherwise; ``KERNEL_BACKEND`` names
the active implementation.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .avds import (
    AvdsConfig,
    AvdsOutcome,
    DistanceKind,
    SubWindowSet,
    avds_adaptive,
    avds_single,
    distance,
    subwindows,
)
from .baselines import ClaheConfig, clahe, hist_equalize
from .diffusion import DiffusionConfig, diffuse, diffusivity, smoothed_gradient_sq
from .errors import (
    AvdsprepError,
    CodecError,
    DimensionMismatch,
    EmptyPipeline,
    InvalidConfig,
    MalformedHeader,
    Truncated,
    UnsupportedMaxval,
)
from .fuzzy import FuzzyConfig, dynamic_threshold, fuzzy_filter, membership_weight
from .pipeline import (
    ChannelPolicy,
    PipelineConfig,
    Stage,
    StageResult,
    StageTrace,
    run_pipeline,
)
from .quality import (
    QualityReport,
    contrast,
    evaluate,
    mse,
    psnr,
    psnr_from_mse,
    rmse,
    rmse_from_mse,
    shannon_entropy,
)
from .raster import (
    ChannelOrder,
    Histogram,
    Image,
    Pdf,
    Plane,
    histogram,
    histogram_csv,
    load_pnm,
    mirror_pad,
    save_pnm,
    to_gray,
    window_at,
)

__all__ = [
    "AvdsConfig",
    "AvdsOutcome",
    "AvdsprepError",
    "ChannelOrder",
    "ChannelPolicy",
    "ClaheConfig",
    "CodecError",
    "DiffusionConfig",
    "DimensionMismatch",
    "DistanceKind",
    "EmptyPipeline",
    "FuzzyConfig",
    "Histogram",
    "Image",
    "InvalidConfig",
    "KERNEL_BACKEND",
    "MalformedHeader",
    "Pdf",
    "PipelineConfig",
    "Plane",
    "QualityReport",
    "Stage",
    "StageResult",
    "StageTrace",
    "SubWindowSet",
    "Truncated",
    "UnsupportedMaxval",
    "avds_adaptive",
    "avds_single",
    "clahe",
    "contrast",
    "diffuse",
    "diffusivity",
    "distance",
    "dynamic_threshold",
    "evaluate",
    "fuzzy_filter",
    "hist_equalize",
    "histogram",
    "histogram_csv",
    "load_pnm",
    "membership_weight",
    "mirror_pad",
    "mse",
    "psnr",
    "psnr_from_mse",
    "rmse",
    "rmse_from_mse",
    "run_pipeline",
    "save_pnm",
    "shannon_entropy",
    "smoothed_gradient_sq",
    "subwindows",
    "to_gray",
    "window_at",
    "__version__",
]
