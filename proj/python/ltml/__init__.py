"""Long-tailed multi-label classification lab: python surface over the C++ core."""

from ltml._core import (
    adaptive_lambda,
    auc,
    bacc,
    compute_class_stats,
    generate_dataset,
    gradient_curves,
    k_schedule,
    loss,
    loss_value_frozen_lambda,
    select_large_losses,
    shift_logits,
)

__all__ = [
    "adaptive_lambda",
    "auc",
    "bacc",
    "compute_class_stats",
    "generate_dataset",
    "gradient_curves",
    "k_schedule",
    "loss",
    "loss_value_frozen_lambda",
    "select_large_losses",
    "shift_logits",
]
