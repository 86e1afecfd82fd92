"""Command-line interface.

Five subcommands cover the workflow end to end::

    tsrecon generate     synthesize a clean benchmark series to CSV
    tsrecon corrupt      zero out a random fraction and write series + mask
    tsrecon train        fit one model kind and save it
    tsrecon reconstruct  fill the masked entries of a corrupted series
    tsrecon bench        run a methods x proportions sweep and write a report

Every command accepts ``--config FILE`` (a JSON object); explicit flags
override file values, defaults fill the rest, and the fully resolved
configuration is echoed as JSON next to the outputs. Unknown config keys
are rejected.

Exit codes: 0 on success (including a bench whose individual cells failed;
those are reported and skipped), 1 for usage or configuration problems
(bad flags, malformed config/input files), 2 for runtime failures after
the configuration resolved (training, model files, output writing).
"""

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import evaluation as ev
from .errors import ModelFileError
from .io import (
    read_mask_csv,
    read_series_csv,
    write_json,
    write_mask_csv,
    write_series_csv,
)
from .models import (
    ModelKind,
    TrainConfig,
    load_model,
    reconstruct,
    save_model,
    train_model,
)
from .nn import LossConfig
from .series import (
    CorruptedSeries,
    CorruptionMask,
    WindowConfig,
    corrupt_series,
    mask_ratio,
)
from .synthetic import PowerProfileConfig, RandomSeqConfig

import numpy as np


class CliError(Exception):
    """Usage or configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; this CLI reserves 2 for
    # runtime failures, so raise instead and let main() translate to 1.
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _add_config_flag(parser):
    parser.add_argument(
        "--config", metavar="FILE",
        help="JSON object with the same keys as the flags; flags win",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="tsrecon", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="synthesize a clean series to CSV")
    _add_config_flag(p)
    p.add_argument("--kind", choices=("random", "power"))
    p.add_argument("--out", metavar="CSV")
    p.add_argument("--n", type=int, help="random: number of samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--noise-scale", type=float, help="random: observation noise scale")
    p.add_argument("--r-offset", type=float, help="random: curve window start")
    p.add_argument("--r-span", type=float, help="random: curve window width")
    p.add_argument("--uniform-r", action="store_true", default=None,
                   help="random: draw curve coordinates uniformly")
    p.add_argument("--sort-by-r", action="store_true", default=None,
                   help="random: order samples along the curve")
    p.add_argument("--days", type=int, help="power: number of days")
    p.add_argument("--samples-per-day", type=int)
    p.add_argument("--base-load", type=float)
    p.add_argument("--daily-amplitude", type=float)
    p.add_argument("--noise-sigma", type=float)

    p = sub.add_parser("corrupt", help="zero a random fraction of a series")
    _add_config_flag(p)
    p.add_argument("--data", metavar="CSV", help="clean input series")
    p.add_argument("--rho", type=float, help="fraction of entries to corrupt")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="CSV", help="corrupted series output")
    p.add_argument("--mask-out", metavar="CSV", help="mask output")

    p = sub.add_parser("train", help="fit a model and save it")
    _add_config_flag(p)
    p.add_argument("--method", choices=[k.value for k in ModelKind])
    p.add_argument("--data", metavar="CSV",
                   help="training series (clean; corrupted for AE/IM)")
    p.add_argument("--mask", metavar="CSV",
                   help="AE/IM only: mask marking the zeroed entries of --data")
    p.add_argument("--out", metavar="FILE", help="model file to write")
    p.add_argument("--k-back", type=int, help="window steps of history")
    p.add_argument("--k-fwd", type=int, help="window steps of future")
    p.add_argument("--hidden-dense", type=int)
    p.add_argument("--hidden-lstm", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--rho-train", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--sparsity-weight", type=float)
    p.add_argument("--sparsity-target", type=float)
    p.add_argument("--elm-hidden", type=int)
    p.add_argument("--elm-ridge", type=float)
    p.add_argument("--diag-peepholes", action="store_true", default=None)

    p = sub.add_parser("reconstruct", help="fill the masked entries of a series")
    _add_config_flag(p)
    p.add_argument("--model", metavar="FILE")
    p.add_argument("--data", metavar="CSV", help="corrupted series")
    p.add_argument("--mask", metavar="CSV")
    p.add_argument("--out", metavar="CSV", help="reconstructed series output")

    p = sub.add_parser("bench", help="methods x proportions NMSE sweep")
    _add_config_flag(p)
    p.add_argument("--out-dir", metavar="DIR")
    p.add_argument("--dataset-kind", choices=("random", "power"))
    p.add_argument("--methods", metavar="A,B,...",
                   help="comma-separated model kinds")
    p.add_argument("--proportions", metavar="P,P,...",
                   help="comma-separated missing fractions")
    p.add_argument("--repeats", type=int)
    p.add_argument("--base-seed", type=int)
    p.add_argument("--nmse-scope", choices=ev.NMSE_SCOPES)
    p.add_argument("--plot-rho", type=float,
                   help="proportion whose first repeat feeds the overlay figures")
    return parser


# ---------------------------------------------------------------------------
# Config resolution helpers


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise CliError(f"config file {path} must hold a JSON object")
    return payload


def _reject_unknown(payload: dict, allowed, where: str) -> None:
    unknown = sorted(set(payload) - set(allowed))
    if unknown:
        raise CliError(f"unknown {where} config keys: {', '.join(unknown)}")


def _merged(args, file_cfg: dict, key: str, flag_attr: str | None = None):
    """Flag value if given, else config-file value, else None."""
    flag = getattr(args, flag_attr if flag_attr is not None else key, None)
    if flag is not None:
        return flag
    return file_cfg.get(key)


def _require(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise CliError(f"missing required setting: {key}")
    return cfg[key]


def _build_dataclass(cls, payload: dict, where: str):
    try:
        return cls(**payload)
    except TypeError as exc:
        raise CliError(f"bad {where} settings: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"bad {where} settings: {exc}") from exc


def _echo_path_for(out_path) -> str:
    return os.fspath(out_path) + ".config.json"


def _load_series(path, what: str):
    try:
        return read_series_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read {what} file {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _load_mask(path):
    try:
        return read_mask_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read mask file {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc


_RANDOM_KEYS = ("n", "seed", "noise_scale", "r_offset", "r_span", "uniform_r", "sort_by_r")
_POWER_KEYS = ("days", "samples_per_day", "base_load", "daily_amplitude",
               "noise_sigma", "seed")


def _dataset_config(kind: str, payload: dict):
    if kind == "random":
        _reject_unknown(payload, _RANDOM_KEYS, "random-dataset")
        return _build_dataclass(RandomSeqConfig, payload, "random-dataset")
    _reject_unknown(payload, _POWER_KEYS, "power-dataset")
    return _build_dataclass(PowerProfileConfig, payload, "power-dataset")


_TRAIN_SCALARS = (
    "hidden_dense", "hidden_lstm", "learning_rate", "beta1", "beta2", "adam_eps",
    "epochs", "batch_size", "rho_train", "seed", "elm_hidden", "elm_ridge",
    "diag_peepholes",
)
_TRAIN_KEYS = _TRAIN_SCALARS + ("k_back", "k_fwd", "sparsity_weight", "sparsity_target")


def _train_config(payload: dict, where: str = "training") -> TrainConfig:
    _reject_unknown(payload, _TRAIN_KEYS, where)
    window_over = {k: payload.pop(k) for k in ("k_back", "k_fwd") if k in payload}
    loss_over = {
        k: payload.pop(k)
        for k in ("sparsity_weight", "sparsity_target")
        if k in payload
    }
    base = TrainConfig()
    window = _build_dataclass(
        WindowConfig,
        {"k_back": base.window.k_back, "k_fwd": base.window.k_fwd, **window_over},
        where,
    )
    loss = _build_dataclass(
        LossConfig,
        {
            "sparsity_weight": base.loss.sparsity_weight,
            "sparsity_target": base.loss.sparsity_target,
            **loss_over,
        },
        where,
    )
    cfg = dict(payload)
    cfg["window"] = window
    cfg["loss"] = loss
    return _build_dataclass(TrainConfig, cfg, where)


def _train_config_echo(cfg: TrainConfig) -> dict:
    out = asdict(cfg)
    out["window"] = {"k_back": cfg.window.k_back, "k_fwd": cfg.window.k_fwd}
    out["loss"] = {
        "sparsity_weight": cfg.loss.sparsity_weight,
        "sparsity_target": cfg.loss.sparsity_target,
    }
    return out


# ---------------------------------------------------------------------------
# generate


def _resolve_generate(args):
    file_cfg = _load_config_file(args.config)
    _reject_unknown(file_cfg, ("kind", "out") + _RANDOM_KEYS + _POWER_KEYS, "generate")
    kind = _merged(args, file_cfg, "kind")
    if kind not in ("random", "power"):
        raise CliError("kind must be 'random' or 'power'")
    out = _require({"out": _merged(args, file_cfg, "out")}, "out")
    keys = _RANDOM_KEYS if kind == "random" else _POWER_KEYS
    other = _POWER_KEYS if kind == "random" else _RANDOM_KEYS
    stray = sorted(
        k for k in other
        if k not in keys and _merged(args, file_cfg, k) is not None
    )
    if stray:
        raise CliError(
            f"settings do not apply to kind {kind!r}: {', '.join(stray)}"
        )
    payload = {}
    for key in keys:
        value = _merged(args, file_cfg, key)
        if value is not None:
            payload[key] = value
    dataset = _dataset_config(kind, payload)
    echo = {"command": "generate", "kind": kind, "out": os.fspath(out), **asdict(dataset)}
    return {"kind": kind, "dataset": dataset, "out": out, "echo": echo}


def _run_generate(ctx) -> int:
    if ctx["kind"] == "random":
        from .synthetic import generate_random_sequence as gen
    else:
        from .synthetic import generate_power_profile as gen
    series = gen(ctx["dataset"])
    write_series_csv(ctx["out"], series)
    write_json(_echo_path_for(ctx["out"]), ctx["echo"])
    print(f"wrote {series.length}x{series.channels} series to {ctx['out']}")
    return 0


# ---------------------------------------------------------------------------
# corrupt


def _resolve_corrupt(args):
    file_cfg = _load_config_file(args.config)
    _reject_unknown(file_cfg, ("data", "rho", "seed", "out", "mask_out"), "corrupt")
    cfg = {
        "data": _merged(args, file_cfg, "data"),
        "rho": _merged(args, file_cfg, "rho"),
        "seed": _merged(args, file_cfg, "seed"),
        "out": _merged(args, file_cfg, "out"),
        "mask_out": _merged(args, file_cfg, "mask_out"),
    }
    for key in ("data", "rho", "out", "mask_out"):
        _require(cfg, key)
    if cfg["seed"] is None:
        cfg["seed"] = 0
    try:
        rho = float(cfg["rho"])
        seed = int(cfg["seed"])
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {rho}")
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    series = _load_series(cfg["data"], "series")
    echo = {
        "command": "corrupt", "data": os.fspath(cfg["data"]), "rho": rho,
        "seed": seed, "out": os.fspath(cfg["out"]),
        "mask_out": os.fspath(cfg["mask_out"]),
    }
    return {"series": series, "rho": rho, "seed": seed, "out": cfg["out"],
            "mask_out": cfg["mask_out"], "echo": echo}


def _run_corrupt(ctx) -> int:
    corrupted = corrupt_series(ctx["series"], ctx["rho"], ctx["seed"])
    write_series_csv(ctx["out"], corrupted.series)
    write_mask_csv(ctx["mask_out"], corrupted.mask, corrupted.series.channel_names)
    write_json(_echo_path_for(ctx["out"]), ctx["echo"])
    print(
        f"corrupted {corrupted.mask.corrupted_count} of "
        f"{corrupted.series.values.size} entries"
    )
    return 0


# ---------------------------------------------------------------------------
# train


def _resolve_train(args):
    file_cfg = _load_config_file(args.config)
    _reject_unknown(file_cfg, ("method", "data", "mask", "out") + _TRAIN_KEYS, "train")
    method_name = _merged(args, file_cfg, "method")
    if method_name is None:
        raise CliError("missing required setting: method")
    try:
        method = ModelKind(str(method_name))
    except ValueError:
        raise CliError(
            f"unknown method {method_name!r}; choose from "
            f"{', '.join(k.value for k in ModelKind)}"
        ) from None
    data_path = _require({"data": _merged(args, file_cfg, "data")}, "data")
    out = _require({"out": _merged(args, file_cfg, "out")}, "out")
    mask_path = _merged(args, file_cfg, "mask")

    payload = {}
    for key in _TRAIN_KEYS:
        value = _merged(args, file_cfg, key)
        if value is not None:
            payload[key] = value
    config = _train_config(payload)

    series = _load_series(data_path, "training series")
    if method in (ModelKind.AE, ModelKind.IM):
        if mask_path is not None:
            mask = _load_mask(mask_path)
        else:
            mask = CorruptionMask(np.zeros(series.values.shape, dtype=bool))
        try:
            training_input = CorruptedSeries(series, mask, mask_ratio(mask))
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    else:
        if mask_path is not None:
            raise CliError(
                f"method {method.value} trains on clean data; --mask does not apply"
            )
        training_input = series
    echo = {
        "command": "train", "method": method.value, "data": os.fspath(data_path),
        "mask": None if mask_path is None else os.fspath(mask_path),
        "out": os.fspath(out), "train": _train_config_echo(config),
    }
    return {"method": method, "input": training_input, "config": config,
            "out": out, "echo": echo}


def _run_train(ctx) -> int:
    model = train_model(ctx["method"], ctx["input"], ctx["config"])
    save_model(ctx["out"], model)
    write_json(_echo_path_for(ctx["out"]), ctx["echo"])
    loss = model.metadata.get("final_loss")
    suffix = "" if loss is None else f" (final loss {loss:.6g})"
    print(f"saved {ctx['method'].value} model to {ctx['out']}{suffix}")
    return 0


# ---------------------------------------------------------------------------
# reconstruct


def _resolve_reconstruct(args):
    file_cfg = _load_config_file(args.config)
    _reject_unknown(file_cfg, ("model", "data", "mask", "out"), "reconstruct")
    cfg = {key: _merged(args, file_cfg, key) for key in ("model", "data", "mask", "out")}
    for key in ("model", "data", "mask", "out"):
        _require(cfg, key)
    series = _load_series(cfg["data"], "corrupted series")
    mask = _load_mask(cfg["mask"])
    try:
        corrupted = CorruptedSeries(series, mask, mask_ratio(mask))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    echo = {
        "command": "reconstruct", "model": os.fspath(cfg["model"]),
        "data": os.fspath(cfg["data"]), "mask": os.fspath(cfg["mask"]),
        "out": os.fspath(cfg["out"]),
    }
    return {"model_path": cfg["model"], "corrupted": corrupted,
            "out": cfg["out"], "echo": echo}


def _run_reconstruct(ctx) -> int:
    model = load_model(ctx["model_path"])
    rebuilt = reconstruct(model, ctx["corrupted"])
    write_series_csv(ctx["out"], rebuilt)
    write_json(_echo_path_for(ctx["out"]), ctx["echo"])
    print(
        f"reconstructed {ctx['corrupted'].mask.corrupted_count} entries "
        f"with the {model.kind.value} model"
    )
    return 0


# ---------------------------------------------------------------------------
# bench


_BENCH_KEYS = ("out_dir", "dataset_kind", "dataset", "methods", "proportions",
               "repeats", "base_seed", "nmse_scope", "plot_rho", "train")


def _resolve_bench(args):
    file_cfg = _load_config_file(args.config)
    _reject_unknown(file_cfg, _BENCH_KEYS, "bench")
    out_dir = _merged(args, file_cfg, "out_dir")
    if out_dir is None:
        raise CliError("missing required setting: out_dir")
    kind = _merged(args, file_cfg, "dataset_kind")
    if kind is None:
        raise CliError("missing required setting: dataset_kind")
    if kind not in ("random", "power"):
        raise CliError("dataset_kind must be 'random' or 'power'")
    dataset_payload = file_cfg.get("dataset", {})
    if not isinstance(dataset_payload, dict):
        raise CliError("dataset must be a JSON object")
    dataset = _dataset_config(kind, dict(dataset_payload))

    methods_value = _merged(args, file_cfg, "methods")
    if methods_value is None:
        raise CliError("missing required setting: methods")
    if isinstance(methods_value, str):
        methods_value = [m.strip() for m in methods_value.split(",") if m.strip()]
    try:
        methods = tuple(ModelKind(str(m)) for m in methods_value)
    except ValueError as exc:
        raise CliError(f"bad methods list: {exc}") from exc

    proportions_value = _merged(args, file_cfg, "proportions")
    if proportions_value is None:
        proportions = (0.1, 0.2, 0.3, 0.4, 0.5)
    else:
        if isinstance(proportions_value, str):
            proportions_value = [
                p.strip() for p in proportions_value.split(",") if p.strip()
            ]
        try:
            proportions = tuple(float(p) for p in proportions_value)
        except (TypeError, ValueError) as exc:
            raise CliError(f"bad proportions list: {exc}") from exc

    train_payload = file_cfg.get("train", {})
    if not isinstance(train_payload, dict):
        raise CliError("train must be a JSON object")
    train_payload = dict(train_payload)
    for banned in ("rho_train", "seed"):
        if banned in train_payload:
            raise CliError(
                f"train.{banned} is derived per cell and cannot be set in a bench plan"
            )
    train = _train_config(train_payload, "bench training")

    plan_fields = {
        "dataset_kind": kind,
        "dataset": dataset,
        "methods": methods,
        "proportions": proportions,
        "train": train,
    }
    repeats = _merged(args, file_cfg, "repeats")
    if repeats is not None:
        plan_fields["repeats"] = int(repeats)
    base_seed = _merged(args, file_cfg, "base_seed")
    if base_seed is not None:
        plan_fields["base_seed"] = int(base_seed)
    scope = _merged(args, file_cfg, "nmse_scope")
    if scope is not None:
        plan_fields["nmse_scope"] = str(scope)
    plot_rho = _merged(args, file_cfg, "plot_rho")
    if plot_rho is not None:
        plan_fields["plot_rho"] = float(plot_rho)
    plan = _build_dataclass(ev.ExperimentPlan, plan_fields, "bench plan")
    train_echo = _train_config_echo(plan.train)
    # Both are derived per cell; echoing the base values would mislead.
    train_echo.pop("rho_train")
    train_echo.pop("seed")
    echo = {
        "command": "bench",
        "out_dir": os.fspath(out_dir),
        "dataset_kind": plan.dataset_kind,
        "dataset": asdict(plan.dataset),
        "methods": [m.value for m in plan.methods],
        "proportions": list(plan.proportions),
        "repeats": plan.repeats,
        "base_seed": plan.base_seed,
        "nmse_scope": plan.nmse_scope,
        "plot_rho": plan.plot_rho,
        "train": train_echo,
    }
    return {"plan": plan, "out_dir": out_dir, "echo": echo}


def _run_bench(ctx) -> int:
    from .figures import render_report_figures
    from .io import atomic_write_text

    plan = ctx["plan"]
    out_dir = os.fspath(ctx["out_dir"])
    os.makedirs(out_dir, exist_ok=True)

    def progress(cell):
        if cell.error is None:
            print(
                f"  {cell.method.value} rho={cell.rho:g} repeat={cell.repeat}: "
                f"nmse={cell.nmse:.6f} ({cell.seconds:.2f}s)",
                file=sys.stderr,
            )
        else:
            print(
                f"  {cell.method.value} rho={cell.rho:g} repeat={cell.repeat}: "
                f"FAILED ({cell.error})",
                file=sys.stderr,
            )

    report = ev.run_experiment(plan, progress=progress)
    paths = []
    atomic_write_text(os.path.join(out_dir, "table.txt"), ev.report_table_text(report))
    paths.append("table.txt")
    atomic_write_text(os.path.join(out_dir, "table.csv"), ev.report_table_csv(report))
    paths.append("table.csv")
    atomic_write_text(os.path.join(out_dir, "cells.csv"), ev.report_cells_csv(report))
    paths.append("cells.csv")
    for plot in report.plots:
        name = f"plotdata_{plot.method.value}.csv"
        atomic_write_text(os.path.join(out_dir, name), ev.plotdata_csv(plot))
        paths.append(name)
    for fig_path in render_report_figures(report, out_dir):
        paths.append(os.path.basename(fig_path))
    write_json(os.path.join(out_dir, "config.json"), ctx["echo"])
    paths.append("config.json")

    for cell in report.failed_cells:
        print(
            f"warning: cell {cell.method.value} rho={cell.rho:g} "
            f"repeat={cell.repeat} failed: {cell.error}",
            file=sys.stderr,
        )
    print(f"wrote {', '.join(paths)} to {out_dir}")
    return 0


# ---------------------------------------------------------------------------


_COMMANDS = {
    "generate": (_resolve_generate, _run_generate),
    "corrupt": (_resolve_corrupt, _run_corrupt),
    "train": (_resolve_train, _run_train),
    "reconstruct": (_resolve_reconstruct, _run_reconstruct),
    "bench": (_resolve_bench, _run_bench),
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    resolver, runner = _COMMANDS[args.command]
    try:
        ctx = resolver(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return runner(ctx)
    except ModelFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures map to exit 2 by contract
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main(sys.argv[1:]))
