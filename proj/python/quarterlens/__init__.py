"""Color, segmentation, and review analytics for urban quarters."""

from ._quarterlens import (
    Image,
    Mask,
    __version__,
    ccs_label,
    ccs_top_n,
    class_names,
    class_proportions,
    default_lexicon_json,
    fit_curve,
    gray_world_correct,
    hex_rgb,
    hue_histogram,
    kmeans_palette,
    ks_statistic,
    load_image,
    load_mask,
    quantize_to_ccs,
    rgb_to_hsv,
    hsv_to_rgb,
    run_report,
    save_mask_png,
    save_png,
    score_review,
)

__all__ = [
    "Image",
    "Mask",
    "__version__",
    "ccs_label",
    "ccs_top_n",
    "class_names",
    "class_proportions",
    "default_lexicon_json",
    "fit_curve",
    "gray_world_correct",
    "hex_rgb",
    "hue_histogram",
    "hsv_to_rgb",
    "kmeans_palette",
    "ks_statistic",
    "load_image",
    "load_mask",
    "quantize_to_ccs",
    "rgb_to_hsv",
    "run_report",
    "save_mask_png",
    "save_png",
    "score_review",
]
