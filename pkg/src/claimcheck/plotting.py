"""Figure rendering for histogram reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_histogram_png(rows, path, title="Per-fact support before and after corroboration"):
    """Grouped bar chart of the before/after probability histograms."""
    if not rows:
        raise ValueError("histogram has no rows")
    width = rows[0][1] - rows[0][0]
    centers = [(low + high) / 2.0 for low, high, _, _ in rows]
    before = [row[2] for row in rows]
    after = [row[3] for row in rows]

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar([c - width * 0.21 for c in centers], before, width * 0.38, label="before", color="#4878a8")
    ax.bar([c + width * 0.21 for c in centers], after, width * 0.38, label="after", color="#e1812c")
    ax.set_xlabel("support probability")
    ax.set_ylabel("fact count")
    ax.set_title(title)
    ax.set_xlim(0.0, 1.0)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
