"""Figure rendering for evaluation runs.

Takes the per-record dictionaries the eval pipeline emits and writes
three PNGs next to the delimited output: a histogram of closeness F1,
a histogram of fluency ratios, and a bar chart of controllability check
pass rates.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

CHECK_NAMES = ("lemma", "tense", "voice", "role", "content", "spec")


def _histogram(values: list[float], title: str, xlabel: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=20, color="#4878cf", edgecolor="white")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Date": None})
    plt.close(fig)


def _bars(rates: dict[str, float], title: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    names = list(rates)
    ax.bar(names, [rates[n] for n in names], color="#6acc64", edgecolor="white")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    ax.set_ylabel("pass rate")
    for i, name in enumerate(names):
        ax.text(i, rates[name] + 0.02, f"{rates[name]:.2f}", ha="center", fontsize=8)
    fig.tight_layout()
    # a fixed metadata dict keeps repeated runs byte-identical
    fig.savefig(path, dpi=120, metadata={"Date": None})
    plt.close(fig)


def render_report(rows: list[dict], out_dir: str | Path) -> list[Path]:
    """Write the three evaluation figures into out_dir and return their
    paths. Rows missing a metric are skipped for that figure; a metric
    with no rows at all still produces an (empty) figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    f1s = [r["closeness"]["f1"] for r in rows
           if isinstance(r.get("closeness"), dict) and "f1" in r["closeness"]]
    path = out / "closeness_f1_hist.png"
    _histogram(f1s, "Closeness (weighted F1)", "F1", path)
    written.append(path)

    ratios = [r["fluency_ratio"] for r in rows
              if isinstance(r.get("fluency_ratio"), (int, float))]
    path = out / "fluency_ratio_hist.png"
    _histogram(ratios, "Fluency (edited loss / original loss)", "ratio", path)
    written.append(path)

    rates: dict[str, float] = {}
    for name in CHECK_NAMES:
        flags = [bool(r["checks"][name]) for r in rows
                 if isinstance(r.get("checks"), dict) and name in r["checks"]]
        rates[name] = sum(flags) / len(flags) if flags else 0.0
    path = out / "controllability_bars.png"
    _bars(rates, "Controllability checks", path)
    written.append(path)

    return written
