"""Matplotlib rendering for aggregated robustness reports.

Everything here draws to files through the Agg backend, so it is safe in
headless runs; no function ever opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["comparison_figure", "save_figure"]

_STYLE = {
    "figure.figsize": (9.0, 3.6),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}


def comparison_figure(rows):
    """Mean clean and worst-case mse versus gamma, one line per method.

    ``rows`` are aggregate records with method, gamma, clean_mean,
    clean_sd, robust_mean, robust_sd attributes; standard deviations are
    drawn as error bars when any run count exceeds one.
    """
    with plt.rc_context(_STYLE):
        fig, (ax_clean, ax_robust) = plt.subplots(1, 2, constrained_layout=True)
        methods = sorted({r.method for r in rows})
        for method in methods:
            sub = sorted((r for r in rows if r.method == method), key=lambda r: r.gamma)
            gammas = [r.gamma for r in sub]
            for ax, mean_at, sd_at in (
                (ax_clean, "clean_mean", "clean_sd"),
                (ax_robust, "robust_mean", "robust_sd"),
            ):
                means = [getattr(r, mean_at) for r in sub]
                sds = [getattr(r, sd_at) for r in sub]
                ax.errorbar(
                    gammas, means, yerr=sds if any(sds) else None,
                    marker="o", markersize=3, capsize=2, label=method,
                )
        ax_clean.set_title("clean mse")
        ax_robust.set_title("worst-case mse")
        for ax in (ax_clean, ax_robust):
            ax.set_xlabel("gamma")
            ax.set_ylabel("mse")
        ax_clean.legend(fontsize=8)
    return fig


def save_figure(fig, path, dpi: int = 150) -> None:
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
