"""Analysis report: delimited tables plus matplotlib figures.

Reproduces the measurement pipeline over a finished experiment log:
contrast curve with bootstrap intervals, PCA of style embeddings,
acoustic features of every validation stimulus, and emotion
classification UAR (in-domain 4-fold plus cross-set prediction).
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analysis import (contrast_curve, extract_features, kfold_uar,
                       cross_predict_uar, pca, pearson,
                       rating_rows_from_state, StratificationError,
                       FeatureSchemaError)
from .analysis.features import FeatureVector
from .experiment import ExperimentState
from .grid import LatentPoint
from .synth import StimulusCache, get_sentence

LATE_ITERATION = 9          # converged window: iterations 9..n


def _late_cut(n_iterations: int) -> int:
    """First iteration counted as converged (shrinks for short runs)."""
    return min(LATE_ITERATION, max(1, n_iterations // 2))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _contrast_section(state, out: Path, seed: int) -> list:
    rows = rating_rows_from_state(state)
    n_it = state.config.n_iterations
    curve = contrast_curve(rows, n_iterations=n_it, seed=seed)
    _write_csv(out / "contrast.csv",
               ["bin", "n_ratings", "mean_intended", "mean_nonintended",
                "contrast", "ci_low", "ci_high"],
               [[b.label, b.n_ratings, b.mean_intended, b.mean_nonintended,
                 b.contrast, b.ci_low, b.ci_high] for b in curve])
    present = [b for b in curve if b.contrast is not None]
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = np.arange(len(present))
    ys = [b.contrast for b in present]
    err = [[b.contrast - b.ci_low for b in present],
           [b.ci_high - b.contrast for b in present]]
    ax.errorbar(xs, ys, yerr=err, fmt="o-", capsize=3)
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xticks(xs, [b.label for b in present])
    ax.set_xlabel("iteration bin")
    ax.set_ylabel("contrast (intended - non-intended rating)")
    fig.tight_layout()
    fig.savefig(out / "contrast.png", dpi=120)
    plt.close(fig)
    return curve


def _embedding(state, desc, cache: StimulusCache, mode: str) -> np.ndarray:
    point = LatentPoint(desc.indices)
    if mode == "latent":
        return point.weights(state.grid)
    return cache.map.map_point(point, state.grid).vector()


def _pca_section(state, cache, out: Path, mode: str):
    items = state.validation
    X = np.array([_embedding(state, d, cache, mode) for d in items])
    res = pca(X)
    _write_csv(out / "pca_scores.csv",
               ["item_id", "kind", "intended_emotion", "iteration",
                "pc1", "pc2"],
               [[d.item_id, d.kind, d.intended_emotion, d.iteration,
                 res.scores[i, 0], res.scores[i, 1]]
                for i, d in enumerate(items)])
    fig, ax = plt.subplots(figsize=(5.5, 5))
    late = _late_cut(state.config.n_iterations)
    colors = {e: c for e, c in zip(state.config.emotions,
                                   ["#d62728", "#2ca02c", "#1f77b4"])}
    for emotion in state.config.emotions:
        mask = np.array(
            [i for i, d in enumerate(items)
             if d.kind == "trajectory" and d.intended_emotion == emotion
             and d.iteration is not None and d.iteration >= late],
            dtype=int)
        ax.scatter(res.scores[mask, 0], res.scores[mask, 1], s=14,
                   alpha=0.7, label=emotion, color=colors.get(emotion))
    ax.set_xlabel(f"PC1 ({res.explained_variance_ratio[0]:.0%})")
    ax.set_ylabel(f"PC2 ({res.explained_variance_ratio[1]:.0%})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "pca.png", dpi=120)
    plt.close(fig)
    return res


def _features_section(state, cache: StimulusCache, out: Path):
    """Render (via cache) and measure every validation item."""
    feats: dict[str, FeatureVector] = {}
    rows = []
    for d in state.validation:
        if d.stimulus_id not in feats:
            point = LatentPoint(d.indices)
            cache.ensure(point, get_sentence(d.sentence_id), state.grid)
            feats[d.stimulus_id] = extract_features(
                cache.get_audio(d.stimulus_id))
        fv = feats[d.stimulus_id]
        rows.append([d.item_id, d.stimulus_id, d.kind, d.intended_emotion,
                     d.iteration, *fv.as_array().tolist()])
    _write_csv(out / "features.csv",
               ["item_id", "stimulus_id", "kind", "intended_emotion",
                "iteration", *FeatureVector.FIELDS], rows)
    return feats


def _classify_section(state, feats, out: Path, seed: int) -> dict:
    def matrix(items):
        X, y = [], []
        for d in items:
            v = feats[d.stimulus_id].as_array()
            if np.any(np.isnan(v)):
                continue
            X.append(v)
            y.append(d.intended_emotion)
        return np.array(X), np.array(y)

    cut = _late_cut(state.config.n_iterations)
    late = [d for d in state.validation if d.kind == "trajectory"
            and d.iteration is not None and d.iteration >= cut]
    transfer = [d for d in state.validation if d.kind == "transfer"]
    Xl, yl = matrix(late)
    Xt, yt = matrix(transfer)
    results = {}
    try:
        results["uar_trajectory_4fold"] = kfold_uar(Xl, yl, k=4, seed=seed)
        results["uar_transfer_4fold"] = kfold_uar(Xt, yt, k=4, seed=seed)
        results["uar_cross_traj_to_transfer"] = cross_predict_uar(
            Xl, yl, Xt, yt, seed=seed)
        results["uar_cross_transfer_to_traj"] = cross_predict_uar(
            Xt, yt, Xl, yl, seed=seed)
    except (StratificationError, FeatureSchemaError) as e:
        results["error"] = str(e)
    # profile correlation between the two stimulus sets: per-emotion mean
    # standardized feature vectors, flattened
    if len(Xl) and len(Xt):
        mu = Xl.mean(axis=0)
        sd = Xl.std(axis=0)
        sd[sd == 0] = 1.0
        prof_l = np.concatenate([((Xl[yl == e] - mu) / sd).mean(axis=0)
                                 for e in sorted(set(yl))])
        prof_t = np.concatenate([((Xt[yt == e] - mu) / sd).mean(axis=0)
                                 for e in sorted(set(yt))])
        try:
            r, df, p = pearson(prof_l, prof_t)
            results["profile_pearson"] = {"r": r, "df": df, "p": p}
        except ValueError:
            pass
    _write_csv(out / "uar.csv", ["metric", "value"],
               [[k, json.dumps(v) if isinstance(v, dict) else v]
                for k, v in results.items()])
    return results


def write_report(state: ExperimentState, cache: StimulusCache,
                 out_dir: str | Path, seed: int = 0,
                 embedding_mode: str = "prosody") -> dict:
    """Full report bundle; returns the summary dict it also writes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not state.validation:
        raise RuntimeError("log has no validation set; run validate first")
    curve = _contrast_section(state, out, seed)
    pca_res = _pca_section(state, cache, out, embedding_mode)
    feats = _features_section(state, cache, out)
    uar_res = _classify_section(state, feats, out, seed)
    summary = {
        "n_chains": len(state.chains),
        "full_chains": len(state.full_chain_ids),
        "n_validation_items": len(state.validation),
        "n_ratings": sum(len(v) for v in state.ratings.values()),
        "contrast": {b.label: b.contrast for b in curve},
        "pca_explained_variance":
            pca_res.explained_variance_ratio[:3].tolist(),
        "classification": {k: v for k, v in uar_res.items()},
        "embedding_mode": embedding_mode,
    }
    lines = ["experiment analysis report", "=" * 30, ""]
    lines.append("[chains]")
    lines.append(f"  full {summary['full_chains']} / {summary['n_chains']}")
    lines.append("")
    lines.append("[contrast]")
    for b in curve:
        c = "n/a" if b.contrast is None else f"{b.contrast:+.3f}"
        lines.append(f"  {b.label:>8}: {c}  (n={b.n_ratings})")
    lines.append("")
    lines.append("[pca]")
    lines.append("  explained variance: " + ", ".join(
        f"{v:.1%}" for v in pca_res.explained_variance_ratio[:3]))
    lines.append("")
    lines.append("[features]")
    lines.append(f"  columns: {', '.join(FeatureVector.FIELDS)}")
    lines.append(f"  rows: {len(state.validation)} (see features.csv)")
    lines.append("")
    lines.append("[classification]")
    for k, v in uar_res.items():
        lines.append(f"  {k}: {v}")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    (out / "summary.json").write_text(json.dumps(summary, indent=2,
                                                 sort_keys=True) + "\n")
    return summary
