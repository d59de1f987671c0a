from .plots import front_figure, plot_summary, save_figure, schedulability_figure, usage_figure
from .writer import metrics_frame, solution_front, write_metrics

__all__ = [
    "front_figure",
    "metrics_frame",
    "plot_summary",
    "save_figure",
    "schedulability_figure",
    "solution_front",
    "usage_figure",
    "write_metrics",
]
