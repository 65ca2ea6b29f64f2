"""End-to-end experiment runners: step-function classification, the PCA-reduced
image task, the energy-trained Poisson network, the warm-started iterative
solves, and the per-mode gradient diagnostic.

Every runner is a pure function of (config, seed): it trains with the seeded
network and shuffle streams, records frequency-domain convergence at a fixed
cadence, and writes CSV traces plus a resolved-config snapshot that can be
re-run verbatim. Wall-clock columns are all zero unless timing is enabled,
so that identical (config, seed) pairs produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from . import data as datamod
from .config import ExperimentConfig, config_to_text, validate
from .errors import ConfigError, DivergenceError
from .losses import EnergyLossConfig, cross_entropy_loss, energy_loss
from .nn import InitSpec, LrSchedule, backprop, forward, init_mlp, lr_at, sgd_step
from .poisson import (
    Grid1D,
    HybridConfig,
    HybridReport,
    assemble_poisson,
    g_rhs,
    iterate,
    run_hybrid,
    thomas_solve,
)
from .reporting import write_csv, write_svg_lines
from .spectral import (
    FreqTrace,
    Spectrum,
    dft_uniform,
    grad_decomposition,
    nufft_direct,
    pick_peaks,
    rel_freq_diff,
    step_to_threshold,
)

__all__ = ["RunReport", "target_toy", "run_experiment", "run_single"]


@dataclass
class RunReport:
    config: ExperimentConfig
    seed: int
    out_dir: Path
    csv_paths: dict[str, Path] = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    wall_seconds: dict[str, float] = field(default_factory=dict)

    def finish(self):
        missing = [str(p) for p in self.csv_paths.values() if not p.exists()]
        if missing:
            raise OSError(f"run finished without writing: {missing}")
        return self


def target_toy(x) -> np.ndarray:
    """Two-class step targets on [-1, 1]: (1{x >= 0}, 1{x <= 0}).

    Both components are 1 exactly at x = 0; the classes overlap there by
    construction.
    """
    x = np.asarray(x, dtype=float)
    return np.stack([(x >= 0.0).astype(float), (x <= 0.0).astype(float)], axis=-1)


def _clock(cfg: ExperimentConfig) -> Callable[[], float] | None:
    return time.perf_counter if cfg.timing else None


def _init_spec(cfg: ExperimentConfig, seed: int) -> InitSpec:
    return InitSpec(std=cfg.init_std, mean=cfg.init_mean, seed=seed)


def _snapshot(cfg: ExperimentConfig, seed: int, out_dir: Path) -> Path:
    """Write the resolved single-seed config; re-running it reproduces this run."""
    resolved = dataclasses.replace(cfg, seed=seed, seeds=1)
    path = out_dir / "config.txt"
    path.write_text(config_to_text(resolved))
    return path


def _df_row(model: Spectrum, target: Spectrum, peaks, denominator: str) -> dict[int, float]:
    return {g: rel_freq_diff(model, target, g, denominator=denominator) for g in peaks}


def _first_passage_rows(trace: FreqTrace, tau: float) -> list[list]:
    return [[g, step_to_threshold(trace, g, tau)] for g in trace.selected_peaks]


def _emit_trace(out_dir: Path, trace: FreqTrace, tau: float) -> dict[str, Path]:
    paths = {
        "trace": write_csv(out_dir / "trace.csv", trace.header(), trace.table()),
        "first_passage": write_csv(out_dir / "first_passage.csv", ["gamma", "first_step"],
                                   _first_passage_rows(trace, tau)),
    }
    return paths


def _emit_trace_svg(out_dir: Path, trace: FreqTrace, title: str) -> Path:
    steps = [r.recording_step for r in trace.rows]
    series = [(f"gamma={g}", steps, [r.df[g] for r in trace.rows]) for g in trace.selected_peaks]
    return write_svg_lines(out_dir / "trace.svg", series, title=title,
                           xlabel="recording step", ylabel="relative difference", log_y=True)


# ---------------------------------------------------------------------------
# step-function cross-entropy experiment


def run_toy_ce(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    clock = _clock(cfg)
    t0 = clock() if clock else 0.0

    xs = np.linspace(-1.0, 1.0, cfg.samples).reshape(-1, 1)
    targets = target_toy(xs[:, 0])
    target_spec = dft_uniform(targets[:, 0])
    peaks = pick_peaks(target_spec, cfg.peak_max_count, cfg.peak_min_rel_amplitude)

    net = init_mlp([1, *cfg.hidden_widths, 2], cfg.activation, "softmax", _init_spec(cfg, seed))
    schedule = LrSchedule(cfg.lr, cfg.lr_halve_every)
    trace = FreqTrace(tuple(peaks))

    def record(step: int, epoch: int, loss: float, probs: np.ndarray):
        if not np.isfinite(loss):
            raise DivergenceError(epoch, f"loss diverged at epoch {epoch}")
        model_spec = dft_uniform(probs[:, 0])
        wall = (clock() - t0) * 1e3 if clock else 0.0
        trace.append(step, epoch, wall, loss, _df_row(model_spec, target_spec, peaks, cfg.df_denominator))

    probs, _ = forward(net, xs)
    record(0, 0, cross_entropy_loss(probs, targets).value, probs)
    step = 0
    for epoch in range(cfg.epochs):
        try:
            probs, cache = forward(net, xs)
            lv = cross_entropy_loss(probs, targets)
            if not np.isfinite(lv.value):
                raise DivergenceError(epoch, f"loss diverged at epoch {epoch}")
            sgd_step(net, backprop(net, cache, lv.grad), lr_at(schedule, epoch))
            if (epoch + 1) % cfg.record_every == 0:
                probs, _ = forward(net, xs)
                step += 1
                record(step, epoch + 1, cross_entropy_loss(probs, targets).value, probs)
        except ValueError as e:  # NaN logits once the parameters blow up
            raise DivergenceError(epoch, f"training diverged at epoch {epoch}: {e}") from e

    report.csv_paths.update(_emit_trace(out_dir, trace, cfg.first_passage_tau))
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    if cfg.svg:
        _emit_trace_svg(out_dir, trace, "step-target cross entropy")
    report.metrics["final_loss"] = trace.rows[-1].loss
    report.metrics["peaks"] = list(peaks)
    report.metrics["first_passage"] = {g: step_to_threshold(trace, g, cfg.first_passage_tau) for g in peaks}
    report.wall_seconds["total"] = (clock() - t0) if clock else 0.0
    return report.finish()


# ---------------------------------------------------------------------------
# PCA-reduced image classification experiment


def _load_images(cfg: ExperimentConfig, seed: int) -> datamod.ImageSet:
    if cfg.mnist_images and cfg.mnist_labels:
        images = datamod.load_image_set(cfg.mnist_images, cfg.mnist_labels)
        if cfg.samples and cfg.samples < images.num_samples:
            images = datamod.ImageSet(images.images[:, : cfg.samples], images.labels[: cfg.samples])
        return images
    if cfg.synthetic:
        return datamod.synthetic_image_set(cfg.samples, seed=seed)
    raise ConfigError("no dataset: give mnist_images/mnist_labels or set synthetic")


def run_mnist_pca(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    clock = _clock(cfg)
    t0 = clock() if clock else 0.0

    images = _load_images(cfg, seed)
    proj = datamod.pca_project(images, seed=seed)
    coords = proj.coords
    onehot = images.onehot().T                      # (n, 10)
    X = images.images.T                             # (n, pixels)

    target_spec = nufft_direct(coords, onehot[:, 0], cfg.nufft_freqs)
    peaks = pick_peaks(target_spec, cfg.peak_max_count, cfg.peak_min_rel_amplitude)

    net = init_mlp([X.shape[1], *cfg.hidden_widths, 10], cfg.activation, "softmax",
                   _init_spec(cfg, seed))
    schedule = LrSchedule(cfg.lr, cfg.lr_halve_every)
    shuffle_rng = np.random.Generator(np.random.PCG64([seed, 1]))
    trace = FreqTrace(tuple(peaks))

    def record(step: int, epoch: int):
        probs, _ = forward(net, X)
        loss = cross_entropy_loss(probs, onehot).value
        if not np.isfinite(loss):
            raise DivergenceError(epoch, f"loss diverged at epoch {epoch}")
        model_spec = nufft_direct(coords, probs[:, 0], cfg.nufft_freqs)
        wall = (clock() - t0) * 1e3 if clock else 0.0
        trace.append(step, epoch, wall, loss, _df_row(model_spec, target_spec, peaks, cfg.df_denominator))

    record(0, 0)
    step = 0
    n = X.shape[0]
    batch = cfg.batch_size if cfg.batch_size > 0 else n
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(n)
        lr = lr_at(schedule, epoch)
        try:
            for lo in range(0, n, batch):
                sel = order[lo:lo + batch]
                probs, cache = forward(net, X[sel])
                lv = cross_entropy_loss(probs, onehot[sel])
                if not np.isfinite(lv.value):
                    raise DivergenceError(epoch, f"loss diverged at epoch {epoch}")
                sgd_step(net, backprop(net, cache, lv.grad), lr)
            if (epoch + 1) % cfg.record_every == 0:
                step += 1
                record(step, epoch + 1)
        except ValueError as e:  # NaN logits once the parameters blow up
            raise DivergenceError(epoch, f"training diverged at epoch {epoch}: {e}") from e

    projected_rows = [[coords[i], int(images.labels[i])] + list(onehot[i]) for i in range(n)]
    report.csv_paths["projected"] = write_csv(
        out_dir / "projected.csv",
        ["x", "label"] + [f"y{j}" for j in range(10)],
        projected_rows,
    )
    report.csv_paths.update(_emit_trace(out_dir, trace, cfg.first_passage_tau))
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    if cfg.svg:
        _emit_trace_svg(out_dir, trace, "image-task cross entropy, first output dimension")
    report.metrics["final_loss"] = trace.rows[-1].loss
    report.metrics["peaks"] = list(peaks)
    report.wall_seconds["total"] = (clock() - t0) if clock else 0.0
    return report.finish()


# ---------------------------------------------------------------------------
# Poisson experiments


def _poisson_setup(cfg: ExperimentConfig):
    grid = Grid1D(n=cfg.grid_n)
    system = assemble_poisson(grid, g_rhs)
    ref = thomas_solve(system)
    return grid, system, ref


def _tracked_modes(peaks, n: int) -> tuple[int, ...]:
    """Sine-mode indexes nearest the spectral peaks (mode k has index k/2)."""
    ks = sorted({min(n - 1, max(1, 2 * g)) for g in peaks})
    return tuple(ks)


def run_poisson_direct(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    grid, system, ref = _poisson_setup(cfg)
    spec = dft_uniform(ref.full)
    peaks = pick_peaks(spec, cfg.peak_max_count, cfg.peak_min_rel_amplitude)
    report.csv_paths["solution"] = write_csv(
        out_dir / "solution.csv", ["x", "u_star"],
        [[x, u] for x, u in zip(grid.points, ref.full)],
    )
    half = len(spec) // 2
    report.csv_paths["spectrum"] = write_csv(
        out_dir / "spectrum.csv", ["gamma", "amplitude", "is_peak"],
        [[g, float(abs(spec.coefficients[g])), int(g in peaks)] for g in range(half + 1)],
    )
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    report.metrics["residual_inf"] = ref.residual_inf
    report.metrics["peaks"] = list(peaks)
    report.metrics["sup_u_star"] = float(np.max(np.abs(ref.full)))
    return report.finish()


def run_poisson_jacobi(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    clock = _clock(cfg)
    _, system, ref = _poisson_setup(cfg)
    peaks = pick_peaks(dft_uniform(ref.full), cfg.peak_max_count, cfg.peak_min_rel_amplitude)
    modes = _tracked_modes(peaks, cfg.grid_n)
    tol = cfg.iter_tol_rel * float(np.max(np.abs(ref.u_star)))
    run = iterate(system, np.zeros(system.size), ref.u_star, method=cfg.hybrid_method,
                  max_iters=cfg.max_iters, track_modes=modes, tol=tol, clock=clock)
    header = ["iter", "wall_ms", "sup_error"] + [f"alpha_{k}" for k in modes]
    rows = [[r.iteration, r.wall_ms, r.sup_error] + [r.alphas[k] for k in modes] for r in run.records]
    report.csv_paths["iters"] = write_csv(out_dir / "iters.csv", header, rows)
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    if cfg.svg:
        its = [r.iteration for r in run.records]
        series = [("sup_error", its, [r.sup_error for r in run.records])]
        series += [(f"|alpha_{k}|", its, [abs(r.alphas[k]) for r in run.records]) for k in modes]
        write_svg_lines(out_dir / "iters.svg", series, title=f"{cfg.hybrid_method} iteration",
                        xlabel="iteration", ylabel="sup error / |alpha|", log_y=True)
    report.metrics["iterations"] = run.iterations
    report.metrics["final_sup_error"] = run.records[-1].sup_error
    report.metrics["tracked_modes"] = list(modes)
    return report.finish()


def run_poisson_dnn(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    clock = _clock(cfg)
    t0 = clock() if clock else 0.0

    grid, system, ref = _poisson_setup(cfg)
    gvals = g_rhs(grid.points)
    ecfg = EnergyLossConfig(beta=cfg.beta, grid=grid)
    target_spec = dft_uniform(ref.full)
    peaks = pick_peaks(target_spec, cfg.peak_max_count, cfg.peak_min_rel_amplitude)

    net = init_mlp([1, *cfg.hidden_widths, 1], cfg.activation, "identity", _init_spec(cfg, seed))
    schedule = LrSchedule(cfg.lr, cfg.lr_halve_every)
    xs = grid.points.reshape(-1, 1)
    trace = FreqTrace(tuple(peaks))
    sup_rows: list[list] = []

    def record(step: int, epoch: int):
        out, _ = forward(net, xs)
        u_pred = out[:, 0]
        loss = energy_loss(u_pred, gvals, ecfg).value
        if not np.isfinite(loss) or not np.all(np.isfinite(u_pred)):
            raise DivergenceError(epoch, f"training diverged at epoch {epoch}")
        model_spec = dft_uniform(u_pred)
        wall = (clock() - t0) * 1e3 if clock else 0.0
        trace.append(step, epoch, wall, loss, _df_row(model_spec, target_spec, peaks, cfg.df_denominator))
        sup_rows.append([step, epoch, float(np.max(np.abs(u_pred - ref.full)))])
        return u_pred

    u_pred = record(0, 0)
    step = 0
    for epoch in range(cfg.epochs):
        out, cache = forward(net, xs)
        lv = energy_loss(out[:, 0], gvals, ecfg)
        if not np.isfinite(lv.value):
            raise DivergenceError(epoch, f"training diverged at epoch {epoch}")
        sgd_step(net, backprop(net, cache, lv.grad.reshape(-1, 1)), lr_at(schedule, epoch))
        if (epoch + 1) % cfg.record_every == 0:
            step += 1
            u_pred = record(step, epoch + 1)

    report.csv_paths.update(_emit_trace(out_dir, trace, cfg.first_passage_tau))
    report.csv_paths["sup_error"] = write_csv(out_dir / "sup_error.csv",
                                              ["step", "epoch", "sup_error"], sup_rows)
    report.csv_paths["solution"] = write_csv(
        out_dir / "solution.csv", ["x", "u_dnn", "u_star"],
        [[x, up, us] for x, up, us in zip(grid.points, u_pred, ref.full)],
    )
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    if cfg.svg:
        _emit_trace_svg(out_dir, trace, "energy-trained network vs direct solution")
    sup_star = float(np.max(np.abs(ref.full)))
    report.metrics["final_loss"] = trace.rows[-1].loss
    report.metrics["final_sup_error"] = sup_rows[-1][2]
    report.metrics["rel_sup_error"] = sup_rows[-1][2] / sup_star
    report.metrics["peaks"] = list(peaks)
    report.metrics["first_passage"] = {g: step_to_threshold(trace, g, cfg.first_passage_tau) for g in peaks}
    report.wall_seconds["total"] = (clock() - t0) if clock else 0.0
    return report.finish()


# ---------------------------------------------------------------------------
# warm-started iterative solves


def _energy_training_stream(cfg: ExperimentConfig, seed: int, grid: Grid1D,
                            gvals: np.ndarray) -> Iterator[tuple[np.ndarray, float]]:
    """Yield (full-grid network values, loss) per step; step 0 is untrained.

    Deterministic in seed, so separate streams replay the same trajectory.
    """
    ecfg = EnergyLossConfig(beta=cfg.beta, grid=grid)
    net = init_mlp([1, *cfg.hidden_widths, 1], cfg.activation, "identity", _init_spec(cfg, seed))
    schedule = LrSchedule(cfg.lr, cfg.lr_halve_every)
    xs = grid.points.reshape(-1, 1)
    epoch = 0
    while True:
        out, cache = forward(net, xs)
        lv = energy_loss(out[:, 0], gvals, ecfg)
        yield out[:, 0].copy(), lv.value
        sgd_step(net, backprop(net, cache, lv.grad.reshape(-1, 1)), lr_at(schedule, epoch))
        epoch += 1


def _hybrid_rows(rep: HybridReport, method: str) -> list[list]:
    rows = [["dnn", r.step, r.wall_ms, r.sup_error] for r in rep.phase1]
    base_wall = rep.phase1[-1].wall_ms if rep.phase1 else 0.0
    rows += [[method, r.iteration, base_wall + r.wall_ms, r.sup_error] for r in rep.phase2.records]
    return rows


_HYBRID_HEADER = ["phase", "step_or_iter", "cum_wall_ms", "sup_error"]


def run_d_jacobi(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    clock = _clock(cfg)
    t0 = clock() if clock else 0.0

    grid, system, ref = _poisson_setup(cfg)
    gvals = g_rhs(grid.points)
    target = cfg.iter_tol_rel * float(np.max(np.abs(ref.u_star)))

    def hybrid(switch_step: int | None) -> HybridReport:
        hcfg = HybridConfig(
            target=target, switch_step=switch_step, plateau_window=cfg.plateau_window,
            plateau_tol=cfg.plateau_tol, method=cfg.hybrid_method,
            record_every=cfg.record_every, max_steps=cfg.epochs,
            max_phase2_iters=cfg.max_iters,
        )
        return run_hybrid(system, _energy_training_stream(cfg, seed, grid, gvals), hcfg, clock=clock)

    rep_plateau = hybrid(None)
    plateau_step = rep_plateau.switched_at
    rep_early = hybrid(max(1, plateau_step // 4))
    rep_late = hybrid(min(2 * plateau_step, cfg.epochs))
    cold = iterate(system, np.zeros(system.size), ref.u_star, method=cfg.hybrid_method,
                   max_iters=cfg.max_iters, tol=target, clock=clock)

    labelled = [("early", rep_early), ("plateau", rep_plateau), ("late", rep_late)]
    for label, rep in labelled:
        report.csv_paths[f"hybrid_{label}"] = write_csv(
            out_dir / f"hybrid_{label}.csv", _HYBRID_HEADER, _hybrid_rows(rep, cfg.hybrid_method))
    report.csv_paths["baseline"] = write_csv(
        out_dir / "baseline.csv", _HYBRID_HEADER,
        [[cfg.hybrid_method, r.iteration, r.wall_ms, r.sup_error] for r in cold.records])
    summary = [[label, rep.switched_at, rep.sup_error_at_switch, rep.post_iterations]
               for label, rep in labelled]
    summary.append(["cold", 0, cold.records[0].sup_error, cold.iterations])
    report.csv_paths["summary"] = write_csv(
        out_dir / "summary.csv",
        ["label", "switch_step", "sup_error_at_switch", "post_iterations"], summary)
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    if cfg.svg:
        series = [(label, [row[1] for row in _hybrid_rows(rep, cfg.hybrid_method) if row[0] != "dnn"],
                   [row[3] for row in _hybrid_rows(rep, cfg.hybrid_method) if row[0] != "dnn"])
                  for label, rep in labelled]
        series.append(("cold", [r.iteration for r in cold.records], [r.sup_error for r in cold.records]))
        write_svg_lines(out_dir / "hybrid.svg", series, title="warm vs cold iterative solve",
                        xlabel="post-switch iteration", ylabel="sup error", log_y=True)
    report.metrics["plateau_step"] = plateau_step
    report.metrics["plateau_detected"] = rep_plateau.plateau_detected
    report.metrics["post_iterations"] = {label: rep.post_iterations for label, rep in labelled}
    report.metrics["cold_iterations"] = cold.iterations
    report.metrics["sup_at_switch"] = {label: rep.sup_error_at_switch for label, rep in labelled}
    report.wall_seconds["total"] = (clock() - t0) if clock else 0.0
    return report.finish()


# ---------------------------------------------------------------------------
# gradient decomposition diagnostic


def run_diagnose_grad(cfg: ExperimentConfig, seed: int, out_dir: Path) -> RunReport:
    report = RunReport(cfg, seed, out_dir)
    n = cfg.samples
    xs = (-1.0 + 2.0 * np.arange(n) / n).reshape(-1, 1)
    if cfg.diag_loss == "mse":
        net = init_mlp([1, *cfg.hidden_widths, 1], cfg.activation, "identity", _init_spec(cfg, seed))
        target = target_toy(xs[:, 0])[:, :1]

        def pointwise(outputs):
            diff = outputs - target
            return np.sum(diff * diff, axis=1), 2.0 * diff
    else:
        net = init_mlp([1, *cfg.hidden_widths, 2], cfg.activation, "softmax", _init_spec(cfg, seed))
        target = target_toy(xs[:, 0])

        def pointwise(outputs):
            eps = 1e-12
            pc = np.clip(outputs, eps, 1.0)
            qc = np.clip(1.0 - outputs, eps, 1.0)
            values = -np.sum(target * np.log(pc) + (1.0 - target) * np.log(qc), axis=1)
            grads = np.where((outputs > eps) & (outputs < 1.0), -target / pc, 0.0)
            grads += np.where((1.0 - outputs > eps) & (outputs > 0.0), (1.0 - target) / qc, 0.0)
            return values, grads

    dec = grad_decomposition(net, xs, pointwise, output_dim=0)
    mags = dec.mode_magnitudes()
    report.csv_paths["decomposition"] = write_csv(
        out_dir / "decomposition.csv",
        ["gamma", "abs_d", "mode_term_norm"],
        [[k, float(abs(dec.d_k[k])), float(mags[k])] for k in range(n)],
    )
    report.csv_paths["snapshot"] = _snapshot(cfg, seed, out_dir)
    report.metrics["real_residual"] = dec.real_residual
    report.metrics["imag_residual"] = dec.imag_residual
    return report.finish()


# ---------------------------------------------------------------------------
# dispatch


_RUNNERS = {
    "toy_ce": run_toy_ce,
    "mnist_pca": run_mnist_pca,
    "poisson_direct": run_poisson_direct,
    "poisson_jacobi": run_poisson_jacobi,
    "poisson_dnn": run_poisson_dnn,
    "d_jacobi": run_d_jacobi,
    "diagnose_grad": run_diagnose_grad,
}


def run_single(cfg: ExperimentConfig, seed: int, out_dir: str | Path) -> RunReport:
    """Run one experiment instance for one seed, writing into out_dir."""
    validate(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[cfg.experiment](cfg, seed, out)


def run_experiment(cfg: ExperimentConfig) -> list[RunReport]:
    """Run cfg.seeds instances with seeds seed, seed+1, ...

    A single seed writes directly into out_dir; multiple seeds get their own
    seed<N> subdirectories.
    """
    validate(cfg)
    reports = []
    for i in range(cfg.seeds):
        seed = cfg.seed + i
        out = Path(cfg.out_dir) if cfg.seeds == 1 else Path(cfg.out_dir) / f"seed{seed}"
        reports.append(run_single(cfg, seed, out))
    return reports
