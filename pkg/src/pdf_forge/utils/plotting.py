"""
Static SVG renderings of already-exported data: the pdf curve with its
ensemble band and the scaled residual quantile scatter.
"""
import io
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from typing import Optional

from pdf_forge.models.scoring import SqrSeries


def _svg(fig) -> str:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg")
    plt.close(fig)
    return buffer.getvalue()


def pdf_figure(
    v: np.ndarray,
    pdf: np.ndarray,
    spread: Optional[np.ndarray] = None,
    true_pdf: Optional[np.ndarray] = None,
    title: str = "Estimated pdf",
) -> str:
    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    ax.plot(v, pdf, color="tab:blue", lw=1.2, label="estimate")
    if spread is not None and spread.size == pdf.size:
        ax.fill_between(v, np.maximum(pdf - spread, 0.0), pdf + spread, color="tab:blue", alpha=0.25, lw=0)
    if true_pdf is not None:
        ax.plot(v, true_pdf, color="black", lw=0.8, ls="--", label="true")
    ax.set_xlabel("v")
    ax.set_ylabel("p(v)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _svg(fig)


def sqr_figure(series: SqrSeries, title: str = "Scaled residual quantiles") -> str:
    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    ax.plot(series.mu, series.delta, ".", ms=2, color="tab:red")
    ax.axhline(0.0, color="black", lw=0.6)
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("s / (N + 1)")
    ax.set_ylabel("sqrt(N + 2) (U(s) - s / (N + 1))")
    ax.set_title(title)
    fig.tight_layout()
    return _svg(fig)
