"""Image data-mixing toolkit.

Cut-and-paste, resize-and-paste, and blend augmentation for 8-bit images,
with exact rational soft labels, saliency-guided patch placement, and
deterministic, replayable batch runs.
"""

from .imgcore import (
    DecodeError,
    center_crop,
    center_crop_region,
    crop,
    load_heatmap,
    load_image,
    resize,
    resize_heatmap_nearest,
    save_image,
)
from .mixers import (
    HALFRES_MODES,
    OBTAIN_MODES,
    PASTE_MODES,
    MixConfig,
    MixedLabel,
    MixResult,
    cutmix,
    halfres_transform,
    mix_labels,
    mix_matrix,
    mixup,
    paste,
    resizemix,
)
from .pipeline import (
    DatasetIndex,
    IndexItem,
    MixRecord,
    load_index,
    mix_stream,
    replay_record,
    run_batch,
    run_halfres,
    split_seed,
    stats_report,
)
from .region import (
    Region,
    SaliencySets,
    region_from_center,
    saliency_sets,
    sample_center,
    sample_region,
)

__version__ = "0.1.0"

__all__ = [
    "DecodeError",
    "DatasetIndex",
    "HALFRES_MODES",
    "IndexItem",
    "MixConfig",
    "MixRecord",
    "MixResult",
    "MixedLabel",
    "OBTAIN_MODES",
    "PASTE_MODES",
    "Region",
    "SaliencySets",
    "center_crop",
    "center_crop_region",
    "crop",
    "cutmix",
    "halfres_transform",
    "load_heatmap",
    "load_image",
    "load_index",
    "mix_labels",
    "mix_matrix",
    "mix_stream",
    "mixup",
    "paste",
    "region_from_center",
    "replay_record",
    "resize",
    "resize_heatmap_nearest",
    "resizemix",
    "run_batch",
    "run_halfres",
    "saliency_sets",
    "sample_center",
    "sample_region",
    "save_image",
    "split_seed",
    "stats_report",
]
