"""Report sinks: JSON lines, a delimited claim summary, and figures.

The figure set is derived from the exact objects (coefficient rational
functions, perturbation bounds) and rendered once per verification run:

* ``bound_decay.png``      level-n perturbation bound against n;
* ``state_coefficients.png`` computed vs reference state coefficients over
  real eta, with the exact psd thresholds marked;
* ``partial_transpose_gap.png`` the partial-transpose eigenvalue that goes
  negative, showing where the state family is NPT.
"""

from __future__ import annotations

import csv
import json
import os
from fractions import Fraction
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .claims import ClaimReport
from .constructions import rho_eta_pipeline, seed_choi
from .positivity import SearchBudget, eps_bound


def write_jsonl(reports: Iterable[ClaimReport], path: str) -> None:
    with open(path, "w") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.to_json()) + "\n")


def write_csv(reports: Iterable[ClaimReport], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["claim", "anchor", "verdict", "runtime_ms", "time_limit_s"])
        for rep in reports:
            writer.writerow([rep.claim, rep.anchor, rep.verdict,
                             rep.runtime_ms, rep.time_limit_s])


def render_figures(outdir: str, seed: int = 7) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    paths = []
    paths.append(_figure_bound_decay(outdir, seed))
    paths.extend(_figure_state_family(outdir))
    return paths


def _figure_bound_decay(outdir: str, seed: int) -> str:
    base = seed_choi(3, 3)
    budget = SearchBudget(restarts=60, seed=seed)
    ns = list(range(1, 9))
    bounds = [eps_bound(base.matrix, n, base.dims, budget) for n in ns]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ns, bounds, "o-")
    ax.set_xlabel("tensor level n")
    ax.set_ylabel("perturbation bound")
    ax.set_title("Safe perturbation shrinks with the tensor level")
    ax.grid(True, which="both", alpha=0.3)
    path = os.path.join(outdir, "bound_decay.png")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _figure_state_family(outdir: str) -> list[str]:
    rep = rho_eta_pipeline()
    etas = [Fraction(k, 100) for k in range(0, 96)]

    def curve(fn):
        return [float(fn.eval_at(t)) for t in etas]

    xs = [float(t) for t in etas]
    comp_a, comp_b = rep.computed_alpha, rep.computed_beta
    ref_a, ref_b = rep.reference_alpha, rep.reference_beta

    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(xs, curve(comp_a), label="alpha (pipeline)")
    ax.plot(xs, curve(comp_b), label="beta (pipeline)")
    ax.plot(xs, curve(ref_a), "--", label="alpha (reference)")
    ax.plot(xs, curve(ref_b), "--", label="beta (reference)")
    for thr, color in ((rep.thresholds_computed.psd_up_to, "tab:blue"),
                       (rep.thresholds_reference.psd_up_to, "tab:orange")):
        ax.axvline(float(thr), color=color, alpha=0.4, linestyle=":")
    ax.set_xlabel("eta")
    ax.set_ylabel("coefficient value")
    ax.set_title("State coefficients; dotted lines mark exact psd thresholds")
    ax.legend()
    ax.grid(True, alpha=0.3)
    p1 = os.path.join(outdir, "state_coefficients.png")
    fig.tight_layout()
    fig.savefig(p1, dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.5, 4))
    gap_comp = comp_a - comp_b * 3
    gap_ref = ref_a - ref_b * 3
    ax.plot(xs, curve(gap_comp), label="pipeline")
    ax.plot(xs, curve(gap_ref), "--", label="reference")
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.set_xlabel("eta")
    ax.set_ylabel("smallest partial-transpose eigenvalue")
    ax.set_title("Negative partial transpose for every eta > 0")
    ax.legend()
    ax.grid(True, alpha=0.3)
    p2 = os.path.join(outdir, "partial_transpose_gap.png")
    fig.tight_layout()
    fig.savefig(p2, dpi=150)
    plt.close(fig)
    return [p1, p2]
