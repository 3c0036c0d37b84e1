"""Figure rendering for report commands.

Every report path can drop PNG figures next to its JSON/CSV output:
score distributions for metric runs, error-category bars for benchmark
runs, and distribution panels for dataset statistics.  Rendering always
uses the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from stlkit.metrics import EvalReport  # noqa: E402
from stlkit.stats import CorpusStats, per_formula_profile  # noqa: E402

_BAR_COLOR = "#4878a8"
_ACCENT = "#b45050"


def _finish(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_score_figure(report: EvalReport, path: str | Path) -> Path:
    """Histogram of per-pair accuracies plus the corpus-level summary."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    bins = [i / 10 for i in range(11)]
    ax1.hist(
        [s.formula_accuracy for s in report.pair_scores],
        bins=bins, color=_BAR_COLOR, edgecolor="white",
    )
    ax1.set_xlabel("formula accuracy")
    ax1.set_ylabel("pairs")
    ax1.set_title("per-pair formula accuracy")
    labels = ["formula acc.", "template acc.", "BLEU"]
    values = [report.formula_accuracy, report.template_accuracy, report.bleu]
    ax2.bar(labels, values, color=[_BAR_COLOR, _BAR_COLOR, _ACCENT])
    ax2.set_ylim(0, 1.05)
    for x, v in enumerate(values):
        ax2.text(x, v + 0.02, f"{v:.3f}", ha="center", fontsize=9)
    ax2.set_title("corpus scores")
    return _finish(fig, Path(path))


def render_error_buckets_figure(buckets: dict[str, int], path: str | Path) -> Path:
    """Bar chart of mismatch categories from a benchmark run."""
    names = list(buckets)
    values = [buckets[n] for n in names]
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    ax.bar(names, values, color=_ACCENT, edgecolor="white")
    for x, v in enumerate(values):
        ax.text(x, v + 0.05, str(v), ha="center", fontsize=9)
    ax.set_ylabel("pairs affected")
    ax.set_title("mismatch categories")
    ax.tick_params(axis="x", rotation=15)
    return _finish(fig, Path(path))


def render_stats_figures(pairs, stats: CorpusStats, outdir: str | Path) -> list[Path]:
    """Distribution panels behind the corpus statistics report."""
    outdir = Path(outdir)
    prof = per_formula_profile(pairs)
    written: list[Path] = []

    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    panels = [
        ("subformulas per formula", prof["sub_counts"]),
        ("operators per formula", prof["op_counts"]),
        ("identifiers per formula", prof["idents_per_formula"]),
    ]
    for ax, (title, data) in zip(axes, panels):
        upper = max(data) if data else 1
        ax.hist(data, bins=range(0, upper + 2), color=_BAR_COLOR, edgecolor="white")
        ax.set_title(title, fontsize=10)
        ax.set_ylabel("formulas")
    written.append(_finish(fig, outdir / "formula_stats.png"))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    counts = prof["word_counts"]
    upper = max(counts) if counts else 1
    ax1.hist(counts, bins=min(20, upper + 1), color=_BAR_COLOR, edgecolor="white")
    ax1.set_title("words per sentence", fontsize=10)
    ax1.set_ylabel("sentences")
    ax2.bar(
        ["formula tokens", "sentence words"],
        [stats.formula.ngram_diversity, stats.text.ngram_diversity],
        color=[_BAR_COLOR, _ACCENT],
    )
    ax2.set_title("n-gram diversity", fontsize=10)
    written.append(_finish(fig, outdir / "text_stats.png"))
    return written
