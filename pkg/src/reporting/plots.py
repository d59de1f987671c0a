"""Plotly figures for evaluation summaries and solution fronts."""

import logging
from pathlib import Path
from typing import List, Literal, Union

import plotly.graph_objects as go

from ..evaluate import MetricsTable
from ..models import SolutionFront

# Configure logging
logger = logging.getLogger(__name__)

Resource = Literal["bandwidth", "cache"]

_AXIS_STYLE = dict(showgrid=True, gridcolor='rgba(128, 128, 128, 0.2)')


def _series(table: MetricsTable):
    groups = {}
    for cell in table.cells:
        groups.setdefault((cell.algorithm, cell.pool, cell.N), []).append(cell)
    for key, cells in sorted(groups.items()):
        yield key, sorted(cells, key=lambda c: c.utilization)


def _layout(fig: go.Figure, title: str, x_title: str, y_title: str) -> go.Figure:
    fig.update_layout(
        title=dict(text=title, font=dict(size=18, family='Arial, sans-serif')),
        xaxis=dict(title=dict(text=x_title, font=dict(size=14)), **_AXIS_STYLE),
        yaxis=dict(title=dict(text=y_title, font=dict(size=14)), **_AXIS_STYLE),
        plot_bgcolor='white',
        width=800,
        height=600,
    )
    return fig


def schedulability_figure(table: MetricsTable) -> go.Figure:
    """Schedulability ratio against target utilization, one line per (algorithm, pool, N)."""
    fig = go.Figure()
    for (algorithm, pool, n), cells in _series(table):
        fig.add_trace(go.Scatter(
            x=[c.utilization for c in cells],
            y=[c.schedulability_ratio for c in cells],
            mode='lines+markers',
            name=f"{algorithm} {pool} N={n}",
        ))
    return _layout(fig, "Schedulability ratio", "Reference utilization", "Schedulable task sets (%)")


def usage_figure(table: MetricsTable, resource: Resource = "bandwidth") -> go.Figure:
    """Mean minimum usage of one resource against target utilization."""
    field = "mean_min_bandwidth" if resource == "bandwidth" else "mean_min_cache"
    limit = table.B if resource == "bandwidth" else table.K
    fig = go.Figure()
    for (algorithm, pool, n), cells in _series(table):
        fig.add_trace(go.Scatter(
            x=[c.utilization for c in cells],
            y=[getattr(c, field) for c in cells],
            mode='lines+markers',
            name=f"{algorithm} {pool} N={n}",
        ))
    fig.update_yaxes(range=[0, limit + 0.5])
    return _layout(fig, f"Minimum {resource} usage", "Reference utilization", f"{resource.capitalize()} partitions")


def front_figure(front: SolutionFront) -> go.Figure:
    """Objective vectors of a front as a staircase."""
    points = sorted((s.used_b, s.used_k) for s in front.solutions)
    fig = go.Figure()
    fig.add_trace(go.Scatter(
        x=[b for b, _ in points],
        y=[k for _, k in points],
        mode='lines+markers',
        line=dict(shape='hv', color='#2E86AB', width=2),
        marker=dict(size=8, color='#2E86AB'),
        name=front.algorithm,
    ))
    fig.update_xaxes(range=[0, front.B + 1])
    fig.update_yaxes(range=[0, front.K + 1])
    return _layout(fig, f"{front.algorithm} front ({len(points)} solutions)", "Bandwidth partitions", "Cache partitions")


def save_figure(fig: go.Figure, path: Union[str, Path]) -> Path:
    """PNG through kaleido when the suffix is ``.png``, HTML otherwise."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".png":
        fig.write_image(str(path), format='png')
    else:
        fig.write_html(str(path))
    logger.info(f"Plot saved to {path}")
    return path


def plot_summary(table: MetricsTable, out_dir: Union[str, Path], fmt: str = "html") -> List[Path]:
    """Schedulability and usage plots for an evaluation summary."""
    out_dir = Path(out_dir)
    figures = {
        "schedulability": schedulability_figure(table),
        "bandwidth_usage": usage_figure(table, "bandwidth"),
        "cache_usage": usage_figure(table, "cache"),
    }
    return [save_figure(fig, out_dir / f"{name}.{fmt}") for name, fig in figures.items()]
