"""Report serialization: versioned JSON, CSV projections, and figures.

Every run writes three artifacts side by side: a JSON document with the
full estimate and diagnostics, a CSV table projecting the per-N series
(every CSV number also appears in the JSON), and a PNG convergence figure
rendered from the same series.  Byte-identical reruns are part of the
contract, so JSON keys are sorted, floats use repr formatting, and the
figure is rendered with fixed geometry and no volatile metadata.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SCHEMA_VERSION = 1

__all__ = ["write_report", "render_figure", "render_paths_figure", "ReportExists"]


class ReportExists(FileExistsError):
    """An output file already exists and --force was not given."""


def _check_targets(paths: list[str], force: bool) -> None:
    for p in paths:
        if os.path.exists(p) and not force:
            raise ReportExists(f"refusing to overwrite {p} (use --force)")


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def _series_rows(payload: dict) -> list[tuple[str, dict]]:
    """Collect (series name, estimate dict) pairs found in the payload."""
    rows = []
    if "per_N" in payload:
        rows.append(("estimate", payload))
    for key in ("estimate", "base", "conjugated"):
        sub = payload.get(key)
        if isinstance(sub, dict) and "per_N" in sub:
            rows.append((key, sub))
    return rows


def _write_csv(path: str, payload: dict) -> None:
    series = _series_rows(payload)
    cols = ["series", "N", "mean", "stderr", "inf_track", "mean_lower", "stderr_lower", "bound_gap"]
    used = [c for c in cols if c in ("series", "N", "mean", "stderr", "inf_track")
            or any(c in row for _, est in series for row in est["per_N"])]
    lines = [",".join(used)]
    for name, est in series:
        for row in est["per_N"]:
            cells = []
            for c in used:
                if c == "series":
                    cells.append(name)
                else:
                    cells.append(_fmt(row[c]) if c in row else "")
            lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def render_figure(path: str, payload: dict, title: str) -> None:
    """Per-iterate convergence figure for every series in the payload."""
    series = _series_rows(payload)
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=110)
    for name, est in series:
        ns = [r["N"] for r in est["per_N"]]
        means = [r["mean"] for r in est["per_N"]]
        errs = [r.get("stderr", 0.0) for r in est["per_N"]]
        ax.errorbar(ns, means, yerr=errs, marker="o", capsize=3, label=f"{name} mean")
        ax.plot(ns, [r["inf_track"] for r in est["per_N"]], ls="--", alpha=0.7, label=f"{name} inf track")
        if est.get("rate_estimate") is not None:
            ax.axhline(est["rate_estimate"], ls=":", alpha=0.7)
    if payload.get("line_stretch"):
        ax.axhline(payload["line_stretch"]["rate"], color="k", ls="-.", alpha=0.7, label="line stretch")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("iterates N")
    ax.set_ylabel("per-iterate value")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def render_paths_figure(path: str, times, points, letters) -> None:
    """Strand tracks over time with crossing marks, for extraction runs."""
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0), dpi=110)
    n = points.shape[1]
    for i in range(n):
        axes[0].plot(points[:, i].real, points[:, i].imag, lw=0.8)
        axes[1].plot(times, points[:, i].real, lw=0.8)
    circle = plt.Circle((0, 0), 1.0, fill=False, color="k", lw=0.5)
    axes[0].add_patch(circle)
    axes[0].set_aspect("equal")
    axes[0].set_title("strand tracks")
    for t, g in letters:
        axes[1].axvline(t, color="r" if g > 0 else "b", alpha=0.25, lw=0.6)
    axes[1].set_title("projection vs time (crossings marked)")
    axes[1].set_xlabel("time")
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def write_report(out_dir: str, payload: dict, title: str, force: bool = False, figure: bool = True) -> list[str]:
    """Write report.json / report.csv / report.png into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    targets = [os.path.join(out_dir, "report.json"), os.path.join(out_dir, "report.csv")]
    if figure:
        targets.append(os.path.join(out_dir, "report.png"))
    _check_targets(targets, force)
    doc = dict(payload)
    doc["schema_version"] = SCHEMA_VERSION
    with open(targets[0], "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    _write_csv(targets[1], payload)
    if figure:
        render_figure(targets[2], payload, title)
    return targets
