"""NMSE scoring and the benchmark harness.

``nmse`` is the headline metric: squared reconstruction error normalized by
signal energy. The default scope restricts both sums to the masked entries
("how wrong are the filled-in values, relative to the energy that was
lost"); scope="all" sums over the whole grid, which for splice-style
reconstructions keeps the same numerator but normalizes by the total signal
energy, giving a number that scales with how much data went missing.

``run_experiment`` sweeps methods x missing-proportions x repeats over one
shared dataset. Every cell derives its own seed from the plan's base seed
and the cell coordinates, so adding methods or proportions never perturbs
the other cells, and a failed cell is recorded and skipped rather than
aborting the sweep.
"""

import hashlib
import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import UndefinedMetricError
from .io import format_float
from .models import (
    ModelKind,
    TrainConfig,
    TrainedModel,
    baseline_elm,
    baseline_im,
    reconstruct,
    train_ae,
    train_dae,
    train_edae,
)
from .series import CorruptedSeries, CorruptionMask, TimeSeries, corrupt_series
from .synthetic import (
    PowerProfileConfig,
    RandomSeqConfig,
    generate_power_profile,
    generate_random_sequence,
)

NMSE_SCOPES = ("masked", "all")


def nmse(
    clean: TimeSeries,
    reconstructed: TimeSeries,
    mask: CorruptionMask,
    scope: str = "masked",
) -> float:
    """Sum of squared errors over signal energy.

    scope="masked": both sums run over the masked entries only.
    scope="all": both sums run over the whole grid.
    Raises UndefinedMetricError when the energy in scope is zero, and
    ValueError for an empty mask (there is nothing to score).
    """
    if scope not in NMSE_SCOPES:
        raise ValueError(f"scope must be one of {NMSE_SCOPES}, got {scope!r}")
    if clean.values.shape != reconstructed.values.shape:
        raise ValueError("clean and reconstructed series must share a grid")
    if clean.values.shape != mask.shape:
        raise ValueError("mask must match the series grid")
    flags = mask.flags
    if not flags.any():
        raise ValueError("mask is empty: no reconstructed entries to score")
    diff = clean.values - reconstructed.values
    if scope == "masked":
        err = float(np.sum(diff[flags] ** 2))
        energy = float(np.sum(clean.values[flags] ** 2))
    else:
        err = float(np.sum(diff ** 2))
        energy = float(np.sum(clean.values ** 2))
    if energy == 0.0:
        raise UndefinedMetricError(f"zero signal energy in scope {scope!r}")
    return err / energy


# ---------------------------------------------------------------------------
# Experiment plans

DATASET_KINDS = ("random", "power")


@dataclass(frozen=True)
class ExperimentPlan:
    """One benchmark sweep over a single dataset.

    ``dataset_kind`` picks the generator, configured by ``dataset``;
    ``methods`` are ModelKind values; ``proportions`` are the evaluated
    missing-rates; each (method, rho) cell is repeated ``repeats`` times
    with per-cell seeds derived from ``base_seed``. ``train`` supplies the
    model hyperparameters, with rho_train and the seed overridden per cell.
    ``nmse_scope`` picks the metric variant; ``plot_rho`` selects the
    proportion whose first repeat is kept for overlay plots (None keeps
    none).
    """

    dataset_kind: str
    dataset: object
    methods: tuple
    proportions: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    repeats: int = 3
    base_seed: int = 0
    train: TrainConfig = TrainConfig()
    nmse_scope: str = "masked"
    plot_rho: float | None = 0.2

    def __post_init__(self):
        if self.dataset_kind not in DATASET_KINDS:
            raise ValueError(
                f"dataset_kind must be one of {DATASET_KINDS}, got {self.dataset_kind!r}"
            )
        expected = {
            "random": RandomSeqConfig,
            "power": PowerProfileConfig,
        }[self.dataset_kind]
        if not isinstance(self.dataset, expected):
            raise ValueError(
                f"dataset for kind {self.dataset_kind!r} must be {expected.__name__}"
            )
        methods = tuple(
            m if isinstance(m, ModelKind) else ModelKind(str(m)) for m in self.methods
        )
        if not methods:
            raise ValueError("methods must be non-empty")
        if len(set(methods)) != len(methods):
            raise ValueError("methods must be distinct")
        object.__setattr__(self, "methods", methods)
        props = tuple(float(p) for p in self.proportions)
        if not props:
            raise ValueError("proportions must be non-empty")
        if any(not 0.0 < p <= 1.0 for p in props):
            raise ValueError(f"proportions must sit in (0, 1], got {props}")
        if len(set(props)) != len(props):
            raise ValueError("proportions must be distinct")
        object.__setattr__(self, "proportions", props)
        if not (isinstance(self.repeats, int) and self.repeats >= 1):
            raise ValueError(f"repeats must be a positive int, got {self.repeats!r}")
        if not isinstance(self.base_seed, int):
            raise ValueError("base_seed must be an int")
        if self.nmse_scope not in NMSE_SCOPES:
            raise ValueError(f"nmse_scope must be one of {NMSE_SCOPES}")
        if self.plot_rho is not None:
            object.__setattr__(self, "plot_rho", float(self.plot_rho))


def cell_seed(base_seed: int, method: ModelKind, rho: float, repeat: int) -> int:
    """Per-cell seed: base seed XOR a hash of the cell coordinates. Stable
    across runs and insensitive to the plan's ordering of methods/rhos."""
    tag = f"{method.value}|{format_float(rho)}|{repeat}".encode("ascii")
    digest = hashlib.sha256(tag).digest()
    return (base_seed ^ int.from_bytes(digest[:8], "little")) & (2 ** 64 - 1)


def generate_dataset(plan: ExperimentPlan) -> TimeSeries:
    if plan.dataset_kind == "random":
        return generate_random_sequence(plan.dataset)
    return generate_power_profile(plan.dataset)


def dataset_fingerprint(series: TimeSeries) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(series.values, dtype="<f8").tobytes())
    h.update(",".join(series.channel_names).encode("utf-8"))
    return h.hexdigest()


@dataclass(frozen=True)
class CellResult:
    """One trained-and-scored benchmark cell (or its recorded failure)."""

    method: ModelKind
    rho: float
    repeat: int
    seed: int
    nmse: float | None
    seconds: float
    error: str | None = None


@dataclass(frozen=True)
class PlotSeries:
    """First-repeat traces kept for overlay figures, one channel."""

    method: ModelKind
    rho: float
    channel: str
    t: np.ndarray
    clean: np.ndarray
    corrupted: np.ndarray
    reconstructed: np.ndarray
    masked: np.ndarray


@dataclass(frozen=True)
class NmseReport:
    """Everything a report consumer needs: the resolved plan, the dataset
    fingerprint, per-cell results, and the kept plot traces."""

    plan: ExperimentPlan
    fingerprint: str
    cells: tuple
    plots: tuple = ()

    def cell_grid(self) -> dict:
        """{(method, rho): [CellResult by repeat]} for the full sweep."""
        grid = {}
        for cell in self.cells:
            grid.setdefault((cell.method, cell.rho), []).append(cell)
        return grid

    def mean_nmse(self, method: ModelKind, rho: float) -> float | None:
        """Mean over the cell's successful repeats; None if all failed."""
        values = [
            c.nmse
            for c in self.cells
            if c.method is method and c.rho == rho and c.nmse is not None
        ]
        if not values:
            return None
        return float(np.mean(values))

    @property
    def failed_cells(self) -> tuple:
        return tuple(c for c in self.cells if c.error is not None)


def _train_for_cell(
    method: ModelKind, clean: TimeSeries, corrupted: CorruptedSeries, config: TrainConfig
) -> TrainedModel:
    if method is ModelKind.AE:
        return train_ae(corrupted, config)
    if method is ModelKind.DAE:
        return train_dae(clean, config)
    if method in (ModelKind.EDAE_NN, ModelKind.EDAE_LSTM):
        return train_edae(clean, config, method)
    if method is ModelKind.IM:
        return baseline_im(corrupted)
    if method is ModelKind.ELM:
        return baseline_elm(clean, config)
    raise ValueError(f"unhandled method {method}")


def run_experiment(plan: ExperimentPlan, progress=None) -> NmseReport:
    """Execute the sweep.

    The dataset is generated once; every cell corrupts it with its own
    seed, trains its method (rho_train = the cell's rho), reconstructs and
    scores. A cell that raises is recorded with its error message and the
    sweep continues. ``progress`` (if given) is called with each CellResult
    as it lands.
    """
    clean = generate_dataset(plan)
    fingerprint = dataset_fingerprint(clean)
    cells = []
    plots = []
    for method in plan.methods:
        for rho in plan.proportions:
            for repeat in range(plan.repeats):
                seed = cell_seed(plan.base_seed, method, rho, repeat)
                config = replace(plan.train, rho_train=rho, seed=seed)
                start = time.perf_counter()
                try:
                    corrupted = corrupt_series(clean, rho, seed)
                    model = _train_for_cell(method, clean, corrupted, config)
                    rebuilt = reconstruct(model, corrupted)
                    score = nmse(clean, rebuilt, corrupted.mask, plan.nmse_scope)
                    cell = CellResult(
                        method, rho, repeat, seed, score,
                        time.perf_counter() - start,
                    )
                    keep_plot = (
                        plan.plot_rho is not None
                        and repeat == 0
                        and abs(rho - plan.plot_rho) < 1e-12
                    )
                    if keep_plot:
                        plots.append(PlotSeries(
                            method, rho, clean.channel_names[0],
                            np.arange(clean.length, dtype=np.float64),
                            clean.values[:, 0].copy(),
                            corrupted.series.values[:, 0].copy(),
                            rebuilt.values[:, 0].copy(),
                            corrupted.mask.flags[:, 0].copy(),
                        ))
                except Exception as exc:
                    cell = CellResult(
                        method, rho, repeat, seed, None,
                        time.perf_counter() - start,
                        f"{type(exc).__name__}: {exc}",
                    )
                cells.append(cell)
                if progress is not None:
                    progress(cell)
    return NmseReport(plan, fingerprint, tuple(cells), tuple(plots))


# ---------------------------------------------------------------------------
# Report rendering


def _mean_cell_text(report: NmseReport, method: ModelKind, rho: float) -> str:
    mean = report.mean_nmse(method, rho)
    if mean is None:
        return "FAILED"
    return f"{mean:.4f}"


def report_table_text(report: NmseReport) -> str:
    """Aligned text table: one row per method, one column per proportion,
    cells holding the mean NMSE over repeats."""
    rhos = report.plan.proportions
    header = ["method"] + [f"rho={format_float(r)}" for r in rhos]
    rows = [header]
    for method in report.plan.methods:
        rows.append(
            [method.value] + [_mean_cell_text(report, method, r) for r in rhos]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    scope = report.plan.nmse_scope
    lines.append("")
    lines.append(f"# NMSE scope: {scope}; mean over {report.plan.repeats} repeats")
    lines.append(f"# dataset fingerprint: {report.fingerprint}")
    return "\n".join(lines) + "\n"


def report_table_csv(report: NmseReport) -> str:
    """The same mean-NMSE grid in delimited form."""
    rhos = report.plan.proportions
    lines = ["method," + ",".join(format_float(r) for r in rhos)]
    for method in report.plan.methods:
        cells = []
        for r in rhos:
            mean = report.mean_nmse(method, r)
            cells.append("" if mean is None else format_float(mean))
        lines.append(method.value + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def report_cells_csv(report: NmseReport) -> str:
    """Every cell on its own row: method,rho,seed,nmse (nmse empty for
    failed cells, which carry the error text in the trailing column).

    Wall-clock timings stay out of this file on purpose: the report files
    are a pure function of the plan, so re-running a bench must reproduce
    them byte for byte. Timings are streamed to stderr instead.
    """
    lines = ["method,rho,seed,nmse,error"]
    for c in report.cells:
        nmse_text = "" if c.nmse is None else format_float(c.nmse)
        err = "" if c.error is None else c.error.replace(",", ";").replace("\n", " ")
        lines.append(
            f"{c.method.value},{format_float(c.rho)},{c.seed},{nmse_text},{err}"
        )
    return "\n".join(lines) + "\n"


def plotdata_csv(plot: PlotSeries) -> str:
    """Overlay trace for one method: t,clean,corrupted,reconstructed; one
    row per time step of the benchmark series."""
    lines = ["t,clean,corrupted,reconstructed"]
    for i in range(plot.t.size):
        lines.append(
            f"{format_float(plot.t[i])},{format_float(plot.clean[i])},"
            f"{format_float(plot.corrupted[i])},{format_float(plot.reconstructed[i])}"
        )
    return "\n".join(lines) + "\n"
