"""Seeded Monte-Carlo drivers for the sensor-network experiments.

Every command takes a plain ``dict`` config, merges it over the defaults of
that experiment and returns a JSON-ready ``dict`` that echoes the merged
config and the package version.  Trial ``i`` draws everything (coordinates,
noise) from its own generator, so results depend only on ``seed`` and the
trial index.  Disconnected graphs are skipped and counted.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterator

import numpy as np

from ._version import __version__
from .chebyshev import chebyshev_coefficients
from .denoising import (LassoConfig, denoise_tikhonov, distributed_filter, distributed_lasso, ista,
                        sgwt_weights)
from .filters import heat_multiplier, inverse_filter_multiplier, naive_inverse_multiplier, tikhonov_multiplier
from .graph import (WeightedGraph, build_geometric_graph, is_connected, lambda_max_bound, laplacian,
                    load_graph, normalized_laplacian)
from .jacobi import convergence_compare, save_curves
from .spectral import apply_multiplier_exact, eigendecompose, operator_matrix
from .ssl import LabelMatrix, load_labels, ssl_centralized, ssl_classify, ssl_kernel
from .wavelets import sgwt_frame

__all__ = [
    "DEFAULTS",
    "ConfigError",
    "merge_config",
    "trial_rng",
    "connected_trials",
    "paraboloid_signal",
    "piecewise_signal",
    "two_clique_graph",
    "cmd_tikhonov",
    "cmd_lasso",
    "cmd_inverse_filter",
    "cmd_ssl",
    "cmd_compare_solvers",
    "cmd_verify",
    "COMMANDS",
    "write_results",
]

_GRAPH = {"n": 500, "sigma": 0.074, "kappa": 0.6, "threshold": "weight"}

DEFAULTS: dict[str, dict] = {
    "tikhonov": {**_GRAPH, "noise": 0.5, "tau": 1.0, "r": 1, "K": 15, "trials": 100, "seed": 0},
    "lasso": {**_GRAPH, "noise": 0.5, "tau": 1.0, "r": 1, "K": 15, "J": 6, "gamma": 0.2,
              "mu_wavelet": 0.75, "mu_scaling": 0.01, "iters": 300, "tol": None,
              "trials": 50, "seed": 0},
    "inverse": {**_GRAPH, "noise": 0.1, "blur_t": 0.5, "tau": 10.0, "r": 1, "K": 30,
                "trials": 20, "seed": 0},
    "ssl": {"fixture": "two_cliques", "n": 200, "sigma": 0.117, "kappa": 0.6, "threshold": "weight",
            "label_fraction": 0.1, "kernel": "laplacian", "kernel_params": {}, "tau": 1.0, "K": 20,
            "K_sweep": [], "graph": None, "labels": None, "truth": None, "trials": 1, "seed": 0},
    "compare": {"n": 200, "sigma": 0.117, "kappa": 0.6, "threshold": "weight", "tau": 0.5,
                "K_max": 40, "f_range": 10.0, "seed": 0},
    "verify": {"cases": 20, "seed": 0, "corrupt": False},
}

_PRESETS = {"paper": {}, "ci": {"trials": 20}}


class ConfigError(ValueError):
    """Invalid or empty experiment configuration."""


def merge_config(kind: str, config: dict | None) -> dict:
    """Overlay ``config`` on the defaults of ``kind``; unknown keys are rejected.

    A ``"preset"`` key (``"paper"`` or ``"ci"``) applies a named overlay
    first.
    """
    if kind not in DEFAULTS:
        raise ConfigError(f"unknown experiment {kind!r}")
    config = dict(config or {})
    preset = config.pop("preset", None)
    cfg = dict(DEFAULTS[kind])
    if preset is not None:
        if preset not in _PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        cfg.update({k: v for k, v in _PRESETS[preset].items() if k in cfg})
    unknown = sorted(set(config) - set(cfg))
    if unknown:
        raise ConfigError(f"unknown config keys for {kind}: {', '.join(unknown)}")
    cfg.update(config)
    if "trials" in cfg and int(cfg["trials"]) < 1:
        raise ConfigError("trials must be at least 1")
    if preset is not None:
        cfg["preset"] = preset
    return cfg


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """PCG64 stream for attempt ``index``, seeded with ``seed + index``."""
    return np.random.default_rng(int(seed) + int(index))


def connected_trials(cfg: dict, count: int, stats: dict) -> Iterator[tuple[int, WeightedGraph, np.random.Generator]]:
    """Yield ``count`` connected random graphs; ``stats`` collects attempt counts."""
    stats.setdefault("attempts", 0)
    stats.setdefault("skipped_disconnected", 0)
    found = 0
    limit = 100 * count + 100
    attempt = 0
    while found < count:
        if attempt >= limit:
            raise RuntimeError("too many disconnected graphs; check n, sigma and kappa")
        rng = trial_rng(cfg["seed"], attempt)
        g = build_geometric_graph(int(cfg["n"]), float(cfg["sigma"]), float(cfg["kappa"]),
                                  seed=rng, threshold=cfg.get("threshold", "weight"))
        attempt += 1
        stats["attempts"] = attempt
        if not is_connected(g):
            stats["skipped_disconnected"] += 1
            continue
        found += 1
        yield attempt - 1, g, rng


def paraboloid_signal(coords) -> np.ndarray:
    """Smooth test signal ``x**2 + y**2 - 1``."""
    x, y = np.asarray(coords, dtype=float).T
    return x**2 + y**2 - 1.0


def piecewise_signal(coords) -> np.ndarray:
    """Piecewise-smooth test signal with a jump across the anti-diagonal."""
    x, y = np.asarray(coords, dtype=float).T
    return np.where(y >= 1.0 - x, -2.0 * x + 0.5, x**2 + y**2 + 0.5)


def _mse(a, b) -> float:
    return float(np.mean((np.asarray(a) - np.asarray(b)) ** 2))


def _add_messages(total: dict, msgs: dict) -> None:
    for k, v in msgs.items():
        total[k] = total.get(k, 0) + int(v)


def _header(kind: str, cfg: dict) -> dict:
    return {"experiment": kind, "version": __version__, "config": cfg, "seed": cfg.get("seed")}


# --- denoising ---------------------------------------------------------------

def cmd_tikhonov(config: dict, audit: bool = False) -> dict:
    """Distributed Tikhonov denoising of the paraboloid signal."""
    cfg = merge_config("tikhonov", config)
    stats: dict = {}
    rows = []
    msgs: dict = {}
    for idx, g, rng in connected_trials(cfg, int(cfg["trials"]), stats):
        f0 = paraboloid_signal(g.coords)
        y = f0 + rng.normal(0.0, float(cfg["noise"]), g.node_count)
        out, trace = distributed_filter(g, y, tikhonov_multiplier(float(cfg["tau"]), int(cfg["r"])),
                                        int(cfg["K"]), audit=audit)
        _add_messages(msgs, {"edge_messages": trace.edge_messages, "scalar_volume": trace.scalar_volume})
        rows.append({"attempt": idx, "edges": g.edge_count, "mse_noisy": _mse(y, f0),
                     "mse_denoised": _mse(out, f0)})
    res = _header("tikhonov", cfg)
    res.update(stats)
    res.update({
        "trials": len(rows),
        "mse_noisy": float(np.mean([r["mse_noisy"] for r in rows])),
        "mse_denoised": float(np.mean([r["mse_denoised"] for r in rows])),
        "message_totals": msgs,
        "per_trial": rows,
    })
    return res


def cmd_lasso(config: dict, audit: bool = False) -> dict:
    """Wavelet lasso versus Tikhonov on the piecewise-smooth signal.

    The exact-operator lasso is solved centrally with the same ISTA
    settings; the approximate-operator lasso runs through the simulator.
    """
    cfg = merge_config("lasso", config)
    stats: dict = {}
    rows = []
    msgs: dict = {}
    J, K = int(cfg["J"]), int(cfg["K"])
    for idx, g, rng in connected_trials(cfg, int(cfg["trials"]), stats):
        n = g.node_count
        f0 = piecewise_signal(g.coords)
        y = f0 + rng.normal(0.0, float(cfg["noise"]), n)
        L = laplacian(g)
        lmax = lambda_max_bound(L, g)
        tik = denoise_tikhonov(g, y, float(cfg["tau"]), int(cfg["r"]), K)
        frame = sgwt_frame(J, lmax)
        mu = sgwt_weights(n, J, float(cfg["mu_wavelet"]), float(cfg["mu_scaling"]))
        lcfg = LassoConfig(mu, float(cfg["gamma"]), int(cfg["iters"]), cfg["tol"])
        approx = chebyshev_coefficients(frame.union, lmax, K)
        res_apx = distributed_lasso(g, y, approx, lcfg, audit=audit)
        _add_messages(msgs, res_apx.messages)
        A = operator_matrix(eigendecompose(L), frame.union)
        a, _, _ = ista(A, None, y, mu, lcfg.gamma, lcfg.max_iter, lcfg.tol)
        rows.append({"attempt": idx, "edges": g.edge_count, "mse_noisy": _mse(y, f0),
                     "mse_tikhonov": _mse(tik, f0), "mse_lasso_exact": _mse(A.T @ a, f0),
                     "mse_lasso_approx": _mse(res_apx.estimate, f0)})
    res = _header("lasso", cfg)
    res.update(stats)
    res["trials"] = len(rows)
    for key in ("mse_noisy", "mse_tikhonov", "mse_lasso_exact", "mse_lasso_approx"):
        res[key] = float(np.mean([r[key] for r in rows]))
    res["mse_denoised"] = res["mse_lasso_approx"]
    res["message_totals"] = msgs
    res["per_trial"] = rows
    return res


def cmd_inverse_filter(config: dict, audit: bool = False) -> dict:
    """Deblurring a heat-diffused paraboloid: regularized inverse vs naive inverse."""
    cfg = merge_config("inverse", config)
    stats: dict = {}
    rows = []
    msgs: dict = {}
    blur = heat_multiplier(float(cfg["blur_t"]))
    for idx, g, rng in connected_trials(cfg, int(cfg["trials"]), stats):
        n = g.node_count
        f0 = paraboloid_signal(g.coords)
        d = eigendecompose(laplacian(g))
        y = apply_multiplier_exact(d, blur, f0) + rng.normal(0.0, float(cfg["noise"]), n)
        h = inverse_filter_multiplier(blur, float(cfg["tau"]), int(cfg["r"]))
        out, trace = distributed_filter(g, y, h, int(cfg["K"]), audit=audit)
        _add_messages(msgs, {"edge_messages": trace.edge_messages, "scalar_volume": trace.scalar_volume})
        with np.errstate(over="ignore", invalid="ignore"):
            naive = apply_multiplier_exact(d, naive_inverse_multiplier(blur), y)
        rows.append({"attempt": idx, "edges": g.edge_count, "mse_observed": _mse(y, f0),
                     "mse_regularized": _mse(out, f0), "mse_naive": _mse(naive, f0)})
    res = _header("inverse", cfg)
    res.update(stats)
    res["trials"] = len(rows)
    for key in ("mse_observed", "mse_regularized", "mse_naive"):
        res[key] = float(np.mean([r[key] for r in rows]))
    res["mse_denoised"] = res["mse_regularized"]
    res["message_totals"] = msgs
    res["per_trial"] = rows
    return res


# --- classification ----------------------------------------------------------

def two_clique_graph(size: int = 6, bridge: float = 0.01) -> WeightedGraph:
    """Two unit-weight cliques of ``size`` nodes joined by one weak edge."""
    edges = []
    for off in (0, size):
        for i in range(size):
            for j in range(i + 1, size):
                edges.append((off + i, off + j, 1.0))
    edges.append((size - 1, size, float(bridge)))
    return WeightedGraph(2 * size, np.array(edges))


def _ssl_instance(cfg: dict, rng: np.random.Generator):
    """Graph, observed labels and ground truth (truth may be None)."""
    if cfg["graph"] is not None:
        g = load_graph(cfg["graph"])
        if cfg["labels"] is None:
            raise ConfigError("a user graph needs a labels file")
        labels = load_labels(cfg["labels"], g.node_count)
        truth = None
        if cfg["truth"] is not None:
            t = load_labels(cfg["truth"], g.node_count, labels.n_classes)
            truth = t.classes
        return g, labels, truth
    if cfg["fixture"] == "two_cliques":
        g = two_clique_graph()
        truth = np.repeat([0, 1], 6)
        return g, LabelMatrix.from_pairs(12, [0, 11], [0, 1]), truth
    if cfg["fixture"] == "geometric":
        stats: dict = {}
        _, g, rng = next(connected_trials(cfg, 1, stats))
        truth = (g.coords[:, 0] >= 0.5).astype(int)
        n = g.node_count
        m = max(2, int(round(float(cfg["label_fraction"]) * n)))
        picked = np.sort(rng.choice(n, size=m, replace=False))
        return g, LabelMatrix.from_pairs(n, picked, truth[picked], 2), truth
    raise ConfigError(f"unknown ssl fixture {cfg['fixture']!r}")


def cmd_ssl(config: dict, audit: bool = False) -> dict:
    """Distributed semi-supervised classification on a fixture or a user graph."""
    cfg = merge_config("ssl", config)
    g, labels, truth = _ssl_instance(cfg, trial_rng(cfg["seed"], 0))
    kernel = ssl_kernel(g, cfg["kernel"], **dict(cfg["kernel_params"]))
    tau = float(cfg["tau"])
    dist = ssl_classify(g, labels, kernel, tau, int(cfg["K"]), audit=audit)
    unl = ~labels.labeled
    res = _header("ssl", cfg)
    res.update({"n": g.node_count, "labeled": int(labels.labeled.sum()), "classes": labels.n_classes,
                "predictions": dist.predictions.tolist(), "message_totals": dist.messages})
    if truth is not None:
        res["accuracy"] = float(np.mean(dist.predictions[unl] == truth[unl])) if unl.any() else 1.0
    central = None
    if g.node_count <= 2000:
        central = ssl_centralized(kernel, labels, tau)
        res["agreement_centralized"] = float(np.mean(dist.predictions == central.predictions))
    sweep = []
    for K in cfg["K_sweep"]:
        p = ssl_classify(g, labels, kernel, tau, int(K)).predictions
        row = {"K": int(K)}
        if central is not None:
            row["agreement_centralized"] = float(np.mean(p == central.predictions))
        if truth is not None and unl.any():
            row["accuracy"] = float(np.mean(p[unl] == truth[unl]))
        sweep.append(row)
    res["K_sweep"] = sweep
    return res


# --- solver comparison -------------------------------------------------------

COMPARE_CASES = ("L_norm", "L2", "LD_inv", "random_walk")


def cmd_compare_solvers(config: dict, out_dir=None) -> dict:
    """Error curves of the Chebyshev method and both Jacobi variants for four choices of ``P``.

    When ``out_dir`` is given, one ``compare_<case>.csv`` per case is written.
    """
    cfg = merge_config("compare", config)
    stats: dict = {}
    _, g, rng = next(connected_trials(cfg, 1, stats))
    r = float(cfg["f_range"])
    f = rng.uniform(-r, r, g.node_count)
    tau = float(cfg["tau"])
    L = laplacian(g)
    setups = {
        "L_norm": (normalized_laplacian(g), None),
        "L2": ((L @ L).tocsr(), None),
        "LD_inv": (None, ssl_kernel(g, "ld_inverse", mode="raw")),
        "random_walk": (None, ssl_kernel(g, "random_walk", r=3, sigma=2.0)),
    }
    res = _header("compare", cfg)
    res.update(stats)
    res["cases"] = {}
    for name in COMPARE_CASES:
        p, kernel = setups[name]
        curves = convergence_compare(p, tau, f, int(cfg["K_max"]), kernel=kernel)
        if out_dir is not None:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            save_curves(curves, Path(out_dir) / f"compare_{name}.csv")
        res["cases"][name] = {
            "rho": curves.rho,
            "lambda_max": curves.lambda_max,
            "err_cheb": curves.err_cheb.tolist(),
            "err_jacobi": curves.err_jacobi.tolist(),
            "err_jacobi_accel": [None if math.isnan(v) else v for v in curves.err_jacobi_accel.tolist()],
        }
    return res


def cmd_verify(config: dict) -> dict:
    """Run the property suites; ``passed`` is False if any suite fails."""
    from .verify import run_suites

    cfg = merge_config("verify", config)
    report = run_suites(cases=int(cfg["cases"]), seed=int(cfg["seed"]), corrupt=bool(cfg["corrupt"]))
    res = _header("verify", cfg)
    res["suites"] = [s.as_dict() for s in report]
    res["passed"] = all(s.passed for s in report)
    return res


COMMANDS = {
    "tikhonov": cmd_tikhonov,
    "lasso": cmd_lasso,
    "inverse": cmd_inverse_filter,
    "ssl": cmd_ssl,
    "compare": cmd_compare_solvers,
    "verify": cmd_verify,
}


def write_results(res: dict, path) -> None:
    """Write a results dict as JSON; floats keep their exact shortest repr."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(res, indent=1, allow_nan=False) + "\n")
