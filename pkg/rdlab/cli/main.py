"""CLI entrypoint for rdlab.

Times are given in years on the command line (1 year = 3.1536e7 s) and
handled in seconds internally.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional

import pandas as pd
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import Progress
from rich.table import Table

from ..analytic.danckwerts import danckwerts_transform
from ..analytic.models import SECONDS_PER_YEAR, ProblemSpec, SeriesOptions, SpaceTimePoint
from ..analytic.series import concentration, pure_reaction, steady_state_profile
from ..config.loader import describe_validation_error, resolve_config, write_run_config
from ..config.schemas import (
    EvalConfig,
    GenConfig,
    SolveConfig,
    SolveMethod,
    SweepConfig,
    SweepKind,
    TrainConfig,
)
from ..data.generator import generate
from ..data.models import Split
from ..data.normalization import compute_norm_stats
from ..data.storage import load_dataset, save_dataset
from ..errors import OutOfDomainError, RdLabError
from ..evaluation.metrics import evaluate_dataset
from ..evaluation.sweeps import (
    batch_sweep,
    coefficient_sweep,
    damkohler_sweep,
    file_sha256,
    threshold_column,
    write_sweep,
)
from ..numerics.crank_nicolson import export_field_csv, observed_order, probe, solve as fd_solve
from ..numerics.models import Grid
from ..surrogate.checkpoint import load_checkpoint, save_checkpoint
from ..surrogate.factory import ORACLE_NAME, load_model
from ..surrogate.predictor import NetworkModel
from ..surrogate.training import save_history, train as train_network

app = typer.Typer(help="Reaction-diffusion solvers, datasets and neural surrogates.")
console = Console()
logger = logging.getLogger(__name__)

JOBS_ENV = "RDLAB_JOBS"


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level")) -> None:
    """Configure logging once for every command."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _fail(error: Exception) -> NoReturn:
    """Print the error and exit with its code: 2 usage, 3 numerical, 4 IO, 5 divergence."""
    if isinstance(error, RdLabError):
        code = error.exit_code
        message = str(error)
    elif isinstance(error, ValidationError):
        code = 2
        message = describe_validation_error(error)
    elif isinstance(error, ValueError):
        code = 2
        message = str(error)
    elif isinstance(error, OSError):
        code = 4
        message = str(error)
    else:
        code = 1
        message = str(error)
    console.print(f"[red]Error:[/red] {escape(message)}")
    raise typer.Exit(code)


def _floats(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"Expected comma-separated numbers, got {text!r}")


def _ints(text: Optional[str]) -> Optional[List[int]]:
    values = _floats(text)
    return None if values is None else [int(v) for v in values]


def _cell(column: str, value: Any) -> str:
    if column.startswith("thr_"):
        return f"{value:.2f}"
    return f"{value:.4g}" if isinstance(value, float) else str(value)


def _dataset_file(path: Path) -> Path:
    """Accept a dataset CSV or a directory holding dataset.csv."""
    path = Path(path)
    return path / "dataset.csv" if path.is_dir() else path


def _fd_point(config: SolveConfig) -> float:
    spec = config.spec
    t = config.t_years * SECONDS_PER_YEAR
    if abs(config.x) > spec.half_thickness * (1.0 + 1e-12):
        raise OutOfDomainError(f"Position {config.x} m lies outside [-{spec.half_thickness}, {spec.half_thickness}] m")
    if t == 0.0:
        if config.grid is not None:
            raise ValueError("--grid needs a positive --t-years")
        return spec.c0 if abs(config.x) >= spec.half_thickness else 0.0
    grid = Grid.build(spec.half_thickness, t, nx=config.nx, nt=config.nt)
    field = fd_solve(spec, grid, config.startup_substeps)
    if config.grid is not None:
        export_field_csv(field, config.grid)
    return probe(field, config.x, t)


def _solve_value(config: SolveConfig) -> float:
    spec = config.spec
    pt = SpaceTimePoint(config.x, config.t_years * SECONDS_PER_YEAR)
    opts = SeriesOptions(max_terms=config.max_terms)
    if config.method == SolveMethod.SERIES:
        return concentration(spec, pt, opts)
    if config.method == SolveMethod.FD:
        return _fd_point(config)
    if config.method == SolveMethod.DANCKWERTS:
        return danckwerts_transform(spec, pt, config.quad_steps, opts)
    if config.method == SolveMethod.STEADY:
        return steady_state_profile(spec, config.x)
    if config.method == SolveMethod.PURE_DIFFUSION:
        return concentration(spec.without_reaction(), pt, opts)
    return pure_reaction(spec.c0, spec.k, pt.t)


@app.command()
def solve(
    method: Optional[SolveMethod] = typer.Option(None, "--method", "-m", help="Solver to use"),
    de: Optional[float] = typer.Option(None, "--de", help="Effective diffusion coefficient, m^2/s"),
    k: Optional[float] = typer.Option(None, "--k", help="Reaction rate, 1/s"),
    c0: Optional[float] = typer.Option(None, "--c0", help="Boundary concentration, mol/m^3"),
    half_thickness: Optional[float] = typer.Option(None, "--half-thickness", "-L", help="Slab half-width, m"),
    x: Optional[float] = typer.Option(None, "--x", help="Position in [-L, L], m"),
    t_years: Optional[float] = typer.Option(None, "--t-years", help="Time, years (1 year = 3.1536e7 s)"),
    grid: Optional[Path] = typer.Option(None, "--grid", help="Write the FD field up to t as x,t,c CSV (fd only)"),
    nx: Optional[int] = typer.Option(None, "--nx", help="FD nodes, odd"),
    nt: Optional[int] = typer.Option(None, "--nt", help="FD time steps"),
    startup_substeps: Optional[int] = typer.Option(None, "--startup-substeps", help="Backward-Euler sub-steps for the first FD step"),
    max_terms: Optional[int] = typer.Option(None, "--max-terms", help="Series truncation limit"),
    quad_steps: Optional[int] = typer.Option(None, "--quad-steps", help="Danckwerts quadrature intervals, even"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML or key = value config file"),
) -> None:
    """Concentration at one point by the chosen method."""
    try:
        cfg = resolve_config(SolveConfig, config, {
            "method": method.value if method else None,
            "spec.de": de,
            "spec.k": k,
            "spec.c0": c0,
            "spec.half_thickness": half_thickness,
            "x": x,
            "t_years": t_years,
            "grid": grid,
            "nx": nx,
            "nt": nt,
            "startup_substeps": startup_substeps,
            "max_terms": max_terms,
            "quad_steps": quad_steps,
        })
        if cfg.grid is not None and cfg.method != SolveMethod.FD:
            raise ValueError("--grid is only available with --method fd")
        value = _solve_value(cfg)
        if cfg.grid is not None:
            write_run_config(cfg, cfg.grid.parent)
    except Exception as e:
        _fail(e)
    typer.echo(f"{value:.12g}")


@app.command()
def gen(
    batches: Optional[int] = typer.Option(None, "--batches", "-n", help="Number of batches"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Samples per batch (default 3000)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    name: Optional[str] = typer.Option(None, "--name", help="Dataset file stem"),
    points_per_spec: Optional[int] = typer.Option(None, "--points-per-spec", help="Samples drawn per sampled problem"),
    norm_mode: Optional[str] = typer.Option(None, "--norm-mode", help="standard or second_moment"),
    preset: Optional[str] = typer.Option(None, "--preset", help="Parameter ranges: full, desk or damkohler"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", envvar=JOBS_ENV, help="Worker processes"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML or key = value config file"),
) -> None:
    """Generate a labeled dataset (CSV plus .meta.json sidecar)."""
    try:
        cfg = resolve_config(GenConfig, config, {
            "generation.n_batches": batches,
            "generation.batch_size": batch_size,
            "generation.seed": seed,
            "generation.points_per_spec": points_per_spec,
            "generation.norm_mode": norm_mode,
            "preset": preset,
            "out": out,
            "name": name,
            "jobs": jobs,
        })
        settings = cfg.generation
        console.print(
            f"[bold blue]Generating[/bold blue] {settings.n_batches} x {settings.batch_size} samples (seed {settings.seed})"
        )
        with Progress(console=console, transient=True) as progress:
            task = progress.add_task("Labeling batches", total=settings.n_batches)
            dataset = generate(settings, jobs=cfg.jobs, progress=lambda _: progress.advance(task))
        path = cfg.out / f"{cfg.name}.csv"
        save_dataset(dataset, path)
        write_run_config(cfg, cfg.out)
    except Exception as e:
        _fail(e)
    sizes = {split.value: len(indices) for split, indices in dataset.splits.items()}
    console.print(f"[green]✓ Dataset written to {path}[/green] [dim](batches {sizes})[/dim]")


@app.command()
def train(
    data: Optional[Path] = typer.Option(None, "--data", "-d", help="Dataset CSV or directory containing dataset.csv"),
    hidden: Optional[str] = typer.Option(None, "--hidden", help="Hidden widths, e.g. 64,64,32"),
    l2: Optional[float] = typer.Option(None, "--lambda", help="L2 coefficient on weights"),
    epochs: Optional[int] = typer.Option(None, "--epochs", "-e", help="Training epochs"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Samples per Adam step"),
    lr: Optional[float] = typer.Option(None, "--lr", help="Adam step size alpha"),
    patience: Optional[int] = typer.Option(None, "--patience", help="Stop after this many epochs without improvement"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Checkpoint path"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML or key = value config file"),
) -> None:
    """Train a surrogate network and write its checkpoint and loss history."""
    try:
        widths = _ints(hidden)
        cfg = resolve_config(TrainConfig, config, {
            "data": data,
            "network.layer_sizes": [6, *widths, 1] if widths is not None else None,
            "network.lambda": l2,
            "network.epochs": epochs,
            "network.seed": seed,
            "network.batch_size": batch_size,
            "network.adam.alpha": lr,
            "network.patience": patience,
            "out": out,
        })
        dataset = load_dataset(_dataset_file(cfg.data))
        if dataset.norm is None:
            features, _ = dataset.split_arrays(Split.TRAIN)
            dataset.norm = compute_norm_stats(features)
        params, report = train_network(dataset, cfg.network)
        save_checkpoint(params, cfg.network, dataset.norm, cfg.out)
        history = cfg.out.with_name(f"{cfg.out.stem}_history.csv")
        save_history(report, history)
        write_run_config(cfg, cfg.out.parent)
    except Exception as e:
        _fail(e)

    table = Table(title="Training")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="white")
    table.add_row("Epochs run", str(report.epochs_run))
    table.add_row("Best epoch", "-" if report.best_epoch is None else str(report.best_epoch + 1))
    table.add_row("Initial validation loss", f"{report.initial_val_loss:.6e}")
    if report.val_loss:
        table.add_row("Best validation loss", f"{min(report.val_loss):.6e}")
    table.add_row("Wall time", f"{report.wall_time:.1f} s")
    console.print(table)
    console.print(f"[green]✓ Checkpoint written to {cfg.out}[/green]")


@app.command(name="eval")
def evaluate(
    model: Optional[str] = typer.Option(None, "--model", help="Checkpoint path, or 'oracle' for the analytic series"),
    data: Optional[Path] = typer.Option(None, "--data", "-d", help="Dataset CSV or directory containing dataset.csv"),
    thresholds: Optional[str] = typer.Option(None, "--thresholds", help="Comma-separated thresholds, mol/m^3"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the report as CSV"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML or key = value config file"),
) -> None:
    """MSE and threshold accuracy per dataset split."""
    try:
        cfg = resolve_config(EvalConfig, config, {
            "model": model,
            "data": data,
            "thresholds": _floats(thresholds),
            "out": out,
        })
        surrogate = load_model(cfg.model)
        reports = evaluate_dataset(surrogate, load_dataset(_dataset_file(cfg.data)), cfg.thresholds)
        thetas = sorted(cfg.thresholds)
        rows = []
        for split, report in reports.items():
            row: Dict[str, Any] = {"split": split.value, "n": report.n, "mse": report.mse}
            row.update({threshold_column(t): report.threshold_accuracy[t] for t in thetas})
            rows.append(row)
        if cfg.out is not None:
            metadata: Dict[str, Any] = {"config": cfg.model_dump(mode="json")}
            if cfg.model != ORACLE_NAME:
                metadata["checkpoint_sha256"] = file_sha256(Path(cfg.model))
            write_sweep(pd.DataFrame(rows), cfg.out, metadata)
            write_run_config(cfg, cfg.out.parent)
    except Exception as e:
        _fail(e)

    table = Table(title="Evaluation")
    table.add_column("Split", style="cyan")
    table.add_column("n", justify="right")
    table.add_column("MSE", justify="right")
    for t in thetas:
        table.add_column(f"Thr({t:g}) %", justify="right")
    for row in rows:
        table.add_row(
            row["split"], str(row["n"]), f"{row['mse']:.4g}", *(f"{row[threshold_column(t)]:.2f}" for t in thetas)
        )
    console.print(table)


@app.command()
def sweep(
    kind: Optional[SweepKind] = typer.Option(None, "--kind", help="batch, k, de or damkohler"),
    model: Optional[str] = typer.Option(None, "--model", help="Checkpoint path, or 'oracle'"),
    values: Optional[str] = typer.Option(None, "--values", help="Comma-separated k or de values"),
    thresholds: Optional[str] = typer.Option(None, "--thresholds", help="Comma-separated thresholds, mol/m^3"),
    similarity: Optional[str] = typer.Option(None, "--similarity", help="Rescale queries into these ranges first: full, desk or damkohler"),
    counts: Optional[str] = typer.Option(None, "--counts", help="Batch counts for --kind batch, ascending"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Samples per batch for --kind batch"),
    hidden: Optional[str] = typer.Option(None, "--hidden", help="Hidden widths for --kind batch"),
    epochs: Optional[int] = typer.Option(None, "--epochs", "-e", help="Training epochs for --kind batch"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed for --kind batch"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output CSV"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", envvar=JOBS_ENV, help="Worker processes"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML or key = value config file"),
) -> None:
    """Run one of the sensitivity experiments and write its table."""
    try:
        widths = _ints(hidden)
        cfg = resolve_config(SweepConfig, config, {
            "kind": kind.value if kind else None,
            "model": model,
            "values": _floats(values),
            "thresholds": _floats(thresholds),
            "similarity": similarity,
            "counts": _ints(counts),
            "generation.batch_size": batch_size,
            "generation.seed": seed,
            "network.layer_sizes": [6, *widths, 1] if widths is not None else None,
            "network.epochs": epochs,
            "network.seed": seed,
            "out": out,
            "jobs": jobs,
        })
        metadata: Dict[str, Any] = {"config": cfg.model_dump(mode="json", by_alias=True)}
        similar = cfg.similarity.ranges() if cfg.similarity else None

        if cfg.kind == SweepKind.BATCH:
            thetas = cfg.thresholds or [2.0, 1.0]
            frame = batch_sweep(cfg.generation, cfg.counts, cfg.network, thetas, cfg.jobs)
            metadata["seed"] = cfg.generation.seed
        else:
            surrogate = load_model(cfg.model)
            if cfg.model != ORACLE_NAME:
                metadata["checkpoint_sha256"] = file_sha256(Path(cfg.model))
            if isinstance(surrogate, NetworkModel):
                metadata["seed"] = surrogate.checkpoint.config.seed
            if cfg.kind == SweepKind.DAMKOHLER:
                thetas = cfg.thresholds or [0.5, 1.0, 2.0]
                kwargs = {"de_values": cfg.values} if cfg.values else {}
                frame = damkohler_sweep(
                    surrogate, thetas=thetas, settings=cfg.lattice, similarity=similar,
                    regimes=cfg.regimes, jobs=cfg.jobs, **kwargs,
                )
            else:
                thetas = cfg.thresholds or [2.0, 1.0, 0.5]
                frame = coefficient_sweep(
                    surrogate, cfg.kind.value, cfg.values, thetas=thetas,
                    settings=cfg.lattice, similarity=similar, regimes=cfg.regimes, jobs=cfg.jobs,
                )
        write_sweep(frame, cfg.out, metadata)
        write_run_config(cfg, cfg.out.parent)
    except Exception as e:
        _fail(e)

    table = Table(title=f"{cfg.kind.value} sweep")
    for column in frame.columns:
        table.add_column(str(column), style="cyan" if column == frame.columns[0] else "white", justify="right")
    for _, row in frame.iterrows():
        table.add_row(*(_cell(str(c), v) for c, v in row.items()))
    console.print(table)
    console.print(f"[green]✓ Sweep written to {cfg.out}[/green]")


@app.command()
def order(
    de: float = typer.Option(2.6e-9, "--de", help="Effective diffusion coefficient, m^2/s"),
    k: float = typer.Option(2.125e-7, "--k", help="Reaction rate, 1/s"),
    c0: float = typer.Option(75.5, "--c0", help="Boundary concentration, mol/m^3"),
    half_thickness: float = typer.Option(0.05, "--half-thickness", "-L", help="Slab half-width, m"),
    base_nx: int = typer.Option(51, "--base-nx", help="Nodes of the coarse grid"),
    t_years: float = typer.Option(1.0, "--t-years", help="Horizon, years"),
) -> None:
    """Observed FD convergence order against the analytic series."""
    try:
        spec = ProblemSpec(de=de, k=k, c0=c0, half_thickness=half_thickness)
        value = observed_order(spec, base_nx=base_nx, horizon=t_years * SECONDS_PER_YEAR)
    except Exception as e:
        _fail(e)
    typer.echo(f"{value:.4f}")


@app.command()
def validate(path: Path) -> None:
    """Check that a checkpoint (.json) or dataset (.csv) loads."""
    if not path.exists():
        console.print(f"[red]File not found:[/red] {path}")
        raise typer.Exit(4)
    try:
        if path.suffix == ".json":
            checkpoint = load_checkpoint(path)
            summary = f"checkpoint with layers {checkpoint.config.layer_sizes}"
        else:
            dataset = load_dataset(path)
            summary = f"dataset with {len(dataset.batches)} batch(es) of {dataset.batch_size}"
    except Exception as e:
        _fail(e)
    console.print(f"[green]✓ Valid {summary}[/green]")


if __name__ == "__main__":
    app()
