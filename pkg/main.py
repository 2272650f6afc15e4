"""
main.py - CLI Entry Point for IRS Radcom Beamforming

Command-line interface for single solves and Monte-Carlo experiments of the
joint transmit / IRS phase-shift design.

Usage:
    python main.py solve-case1 --trace trace.csv
    python main.py --config scenario.json --seed 7 solve-case2 --no-xcorr
    python main.py sweep --var M --values 25,50,75,100 --schemes sdr_case1,penalty_case1
    python main.py --preset outage outage --values 0,5,10,15 --trials 200
    python main.py beampattern --eps 0.1,10,inf
    python main.py convergence --algorithm penalty --m-values 50,75,100
    python main.py version

Exit codes:
    0 success, 1 unexpected error, 2 configuration error, 3 every trial infeasible
"""

from __future__ import annotations

import asyncio
import io
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from conic_core import BaseConicBackend, create_backend
from harness import (
    ExperimentRunner,
    HarnessConfig,
    eps_tag,
    solve_with_restarts,
    write_aggregate_csv,
    write_ao_trace_csv,
    write_beampattern_csv,
    write_convergence_csv,
    write_outage_csv,
    write_penalty_trace_csv,
    write_sweep_csv,
    write_xcorr_csv,
)
from metrics import transmit_power, user_sinrs
from models import (
    Algorithm,
    BeamformerSolution,
    ConfigError,
    InfeasibleOutcome,
    Scheme,
    SolveReport,
    SweepResult,
    SweepSpec,
    SweepVar,
    SystemConfig,
    watts_to_dbm,
)
from scene import generate_channels, trial_rng
from sdr_solver import solve_case2
from settings import load_config, load_system_config, setup_logging
from svg_plot import Series, write_plot

# Fix encoding issues on Windows (legacy code pages can't handle Rich's spinners)
if sys.platform == "win32":
    try:
        if sys.stdout.encoding and sys.stdout.encoding.lower() not in ("utf-8", "utf8"):
            sys.stdout = io.TextIOWrapper(
                sys.stdout.buffer, encoding="utf-8", errors="replace"
            )
            sys.stderr = io.TextIOWrapper(
                sys.stderr.buffer, encoding="utf-8", errors="replace"
            )
    except Exception:
        pass

EXIT_CONFIG_ERROR = 2
EXIT_ALL_INFEASIBLE = 3

# =============================================================================
# CLI APPLICATION
# =============================================================================

app = typer.Typer(
    name="irs-radcom",
    help="Joint transmit and IRS phase-shift beamforming for radar-communication base stations",
    add_completion=False,
)
console = Console()


@dataclass
class CliState:
    """Global options shared by every command."""

    settings: Dict[str, Any] = field(default_factory=dict)
    scenario_path: Optional[Path] = None
    seed: Optional[int] = None
    threads: Optional[int] = None
    out_dir: Optional[Path] = None
    preset: Optional[str] = None

    def scenario(self, **overrides: Any) -> SystemConfig:
        cfg = load_system_config(
            self.scenario_path, config=self.settings, preset=self.preset, seed=self.seed
        )
        if overrides:
            try:
                cfg = cfg.with_updates(**overrides)
            except ValidationError as e:
                raise ConfigError(f"Invalid scenario override:\n{e}") from e
        return cfg

    def harness_config(self) -> HarnessConfig:
        hc = HarnessConfig.from_config(self.settings)
        if self.threads is not None:
            hc.threads = self.threads
        if self.out_dir is not None:
            hc.out_dir = self.out_dir
        return hc

    def backend(self) -> BaseConicBackend:
        try:
            return create_backend(config=self.settings)
        except ValueError as e:
            raise ConfigError(str(e)) from e


# =============================================================================
# HELPER FUNCTIONS
# =============================================================================


@contextmanager
def exit_codes() -> Iterator[None]:
    """Map package errors onto the documented exit codes."""
    try:
        yield
    except typer.Exit:
        raise
    except ConfigError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        raise typer.Exit(code=EXIT_CONFIG_ERROR)
    except KeyboardInterrupt:
        console.print("\n[yellow]Cancelled by user[/yellow]")
        raise typer.Exit(code=130)
    except Exception as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(code=1)


def parse_values(text: str) -> List[float]:
    """Comma-separated numbers; 'inf' is accepted."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(float(part))
        except ValueError:
            raise ConfigError(f"Not a number: '{part}'")
    if not values:
        raise ConfigError("Expected at least one value")
    return values


def parse_schemes(text: str) -> List[Scheme]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    try:
        return [Scheme(name) for name in names]
    except ValueError:
        available = ", ".join(s.value for s in Scheme)
        raise ConfigError(f"Unknown scheme in '{text}'. Available: {available}")


def _dbm(value_w: Optional[float]) -> str:
    if value_w is None:
        return "-"
    return f"{watts_to_dbm(value_w):.3f} dBm"


def _ratio_db(value: Optional[float]) -> str:
    if value is None or value <= 0:
        return "-"
    return f"{10.0 * math.log10(value):.2f} dB"


def _state(ctx: typer.Context) -> CliState:
    return ctx.obj if isinstance(ctx.obj, CliState) else CliState(settings=load_config())


def display_solve_summary(
    title: str,
    cfg: SystemConfig,
    solution: Any,
    report: SolveReport,
    user_sinr_db: Optional[Sequence[float]] = None,
) -> None:
    """Status panel plus a per-user SINR table."""
    feasible = report.feasibility is not None and report.feasibility.feasible
    if isinstance(solution, InfeasibleOutcome):
        color, headline = "red", f"INFEASIBLE ({solution.stage})"
    elif feasible:
        color, headline = "green", "FEASIBLE"
    else:
        color, headline = "yellow", report.status.value.upper()

    power = transmit_power(solution) if isinstance(solution, BeamformerSolution) else None
    radar_power = (
        float(np.sum(np.abs(solution.w_r) ** 2)) if isinstance(solution, BeamformerSolution) else None
    )
    console.print()
    console.print(
        Panel(
            f"[bold {color}]{headline}[/bold {color}]\n\n"
            f"[bold]Status:[/bold] {report.status.value}\n"
            f"[bold]Transmit power:[/bold] {_dbm(power)}\n"
            f"[bold]Radar beam power:[/bold] {_dbm(radar_power)}\n"
            f"[bold]Iterations:[/bold] {report.iters_outer} outer, {report.iters_inner_total} inner\n"
            f"[bold]Radar SINR:[/bold] {_ratio_db(report.radar_sinr_full)} "
            f"(lower bound {_ratio_db(report.radar_sinr_lower_bound)}, "
            f"threshold {cfg.sinr_radar_db:.2f} dB)\n"
            f"[bold]Restarts:[/bold] {report.restarts}\n"
            f"[bold]Duration:[/bold] {report.wall_time_s:.2f}s",
            title=title,
            border_style=color,
        )
    )

    if user_sinr_db is not None:
        table = Table(title="User SINR", show_header=True, header_style="bold cyan")
        table.add_column("User", style="dim")
        table.add_column("SINR (dB)", justify="right")
        table.add_column("Threshold (dB)", justify="right")
        for k, (achieved, threshold) in enumerate(zip(user_sinr_db, cfg.sinr_user_db)):
            ok = achieved >= threshold - 1e-4
            shade = "green" if ok else "red"
            table.add_row(str(k), f"[{shade}]{achieved:.3f}[/{shade}]", f"{threshold:.2f}")
        console.print(table)


def display_sweep_table(result: SweepResult) -> None:
    table = Table(
        title=f"Sweep over {result.spec.sweep_var.value}",
        show_header=True,
        header_style="bold cyan",
    )
    table.add_column("Scheme", style="dim")
    table.add_column("Value", justify="right")
    table.add_column("Feasible", justify="center")
    table.add_column("Mean power (dBm)", justify="right")
    table.add_column("95% CI", justify="right")
    table.add_column("Mean iters", justify="right")
    for agg in result.aggregates:
        rate_color = "green" if agg.feasibility_rate == 1 else "yellow" if agg.feasibility_rate > 0 else "red"
        table.add_row(
            agg.scheme.value,
            f"{agg.sweep_value:g}",
            f"[{rate_color}]{agg.feasible_count}/{agg.trials}[/{rate_color}]",
            f"{agg.mean_power_dbm:.3f}" if agg.mean_power_dbm is not None else "-",
            f"±{agg.ci_half_width_db:.3f}" if agg.ci_half_width_db is not None else "-",
            f"{agg.mean_iters:.1f}",
        )
    console.print(table)


def _solve_once(
    state: CliState,
    scheme: Scheme,
    cfg: SystemConfig,
    dump_path: Optional[Path] = None,
) -> tuple:
    """One realization from (seed, 0, 0); the solver stream is (seed, 0, 0, 1)."""
    cs = generate_channels(cfg, trial_rng(cfg.seed, 0, 0, 0))
    backend = None if scheme.is_penalty else state.backend()
    if dump_path is not None:
        solution, report = solve_case2(
            cfg, cs, trial_rng(cfg.seed, 0, 0, 1), backend=backend, dump_path=dump_path
        )
    else:
        hc = state.harness_config()
        solution, report = solve_with_restarts(scheme, cfg, cs, (0, 0), hc.max_restarts, backend)
    sinr_db = None
    if isinstance(solution, BeamformerSolution):
        sinr_db = [10.0 * math.log10(max(s, 1e-300)) for s in user_sinrs(solution, cs, cfg.noise_power_w)]
    return solution, report, sinr_db


async def _with_progress(description: str, coroutine: Any) -> Any:
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        TimeElapsedColumn(),
        console=console,
    ) as progress:
        task = progress.add_task(f"[cyan]{description}...", total=None)
        result = await coroutine
        progress.update(task, description=f"[green]{description} done")
    return result


# =============================================================================
# GLOBAL OPTIONS
# =============================================================================


@app.callback()
def cli(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Scenario document (JSON or YAML)"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Master seed", min=0),
    threads: Optional[int] = typer.Option(
        None, "--threads", "-t", help="Worker threads (default: logical cores)", min=1
    ),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", "-o", help="Output directory"),
    preset: Optional[str] = typer.Option(
        None, "--preset", "-p", help="Named scenario preset from config.yaml (e.g. outage)"
    ),
    settings: Optional[Path] = typer.Option(
        None, "--settings", help="Application settings file (default: config.yaml)"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
) -> None:
    """Joint active and passive beamforming for IRS-aided radar-communication."""
    app_settings = load_config(settings)
    setup_logging(app_settings, verbose=verbose)
    ctx.obj = CliState(
        settings=app_settings,
        scenario_path=config,
        seed=seed,
        threads=threads,
        out_dir=out_dir,
        preset=preset,
    )


# =============================================================================
# CLI COMMANDS
# =============================================================================


@app.command("solve-case1")
def solve_case1_command(
    ctx: typer.Context,
    trace: Optional[Path] = typer.Option(
        None, "--trace", help="CSV of outer_iter,rho,objective,violation_xi,power_w"
    ),
    comm_only: bool = typer.Option(False, "--comm-only", help="No dedicated radar beams"),
) -> None:
    """
    Solve Case I (no cross-correlation constraint) with the penalty algorithm.

    Examples:
        python main.py solve-case1
        python main.py --config scenario.json --seed 3 solve-case1 --trace trace.csv
    """
    state = _state(ctx)
    with exit_codes():
        cfg = state.scenario()
        if cfg.xcorr_active:
            raise ConfigError("solve-case1 requires cross_corr_limit = inf")
        scheme = Scheme.PENALTY_CASE1_COMM_ONLY if comm_only else Scheme.PENALTY_CASE1
        solution, report, sinr_db = _solve_once(state, scheme, cfg)
        display_solve_summary("Case I (penalty)", cfg, solution, report, sinr_db)
        if trace is not None:
            write_penalty_trace_csv(report, trace)
            console.print(f"[green]Trace written to:[/green] {trace}")
        if solution is None:
            console.print(f"[red]Solve failed:[/red] {report.message}")
            raise typer.Exit(code=1)


@app.command("solve-case2")
def solve_case2_command(
    ctx: typer.Context,
    trace: Optional[Path] = typer.Option(
        None, "--trace", help="CSV of ao_iter,power_w,max_rank_ratio,phase_modulus_min"
    ),
    no_xcorr: bool = typer.Option(
        False, "--no-xcorr", help="Drop the cross-correlation constraint (eps = inf)"
    ),
    comm_only: bool = typer.Option(False, "--comm-only", help="Force Z_r = 0"),
    dump_conic: Optional[Path] = typer.Option(
        None, "--dump-conic", help="Write the first covariance subproblem in triplet form"
    ),
) -> None:
    """
    Solve Case II with the SDR alternating optimization.

    Examples:
        python main.py solve-case2
        python main.py solve-case2 --no-xcorr --trace ao.csv
    """
    state = _state(ctx)
    with exit_codes():
        cfg = state.scenario(cross_corr_limit=math.inf) if no_xcorr else state.scenario()
        scheme = Scheme.SDR_CASE2_COMM_ONLY if comm_only else Scheme.SDR_CASE2
        if comm_only and dump_conic is not None:
            raise ConfigError("--dump-conic is only available for the joint scheme")
        solution, report, sinr_db = _solve_once(state, scheme, cfg, dump_path=dump_conic)
        display_solve_summary("Case II (SDR)", cfg, solution, report, sinr_db)
        if trace is not None:
            write_ao_trace_csv(report, trace)
            console.print(f"[green]Trace written to:[/green] {trace}")
        if dump_conic is not None:
            console.print(f"[green]Conic problem written to:[/green] {dump_conic}")
        if isinstance(solution, InfeasibleOutcome):
            raise typer.Exit(code=EXIT_ALL_INFEASIBLE)
        if solution is None:
            console.print(f"[red]Solve failed:[/red] {report.message}")
            raise typer.Exit(code=1)


@app.command()
def sweep(
    ctx: typer.Context,
    var: SweepVar = typer.Option(SweepVar.M, "--var", help="Swept parameter"),
    values: str = typer.Option("25,50,75,100", "--values", help="Comma-separated values"),
    trials: Optional[int] = typer.Option(None, "--trials", "-n", help="Trials per value", min=1),
    schemes: str = typer.Option(
        "sdr_case1,penalty_case1", "--schemes", help="Comma-separated schemes"
    ),
    no_timing: bool = typer.Option(
        False, "--no-timing", help="Write wall_ms as 0 (byte-comparable CSVs)"
    ),
    plot: bool = typer.Option(True, "--plot/--no-plot", help="Write an SVG plot"),
) -> None:
    """
    Monte-Carlo sweep of transmit power and feasibility.

    Examples:
        python main.py sweep --var M --values 25,50,75,100 --trials 20
        python main.py sweep --var eps_th --values 0.1,1,10,inf --schemes sdr_case2
    """
    state = _state(ctx)
    with exit_codes():
        base = state.scenario()
        hc = state.harness_config()
        hc.record_timing = not no_timing
        try:
            spec = SweepSpec(
                sweep_var=var,
                values=parse_values(values),
                trials=trials or hc.sweep_trials,
                schemes=parse_schemes(schemes),
            )
        except ValidationError as e:
            raise ConfigError(f"Invalid sweep:\n{e}") from e

        runner = ExperimentRunner(hc, backend=state.backend())
        result = asyncio.run(
            _with_progress(f"Sweeping {var.value} ({spec.trials} trials)", runner.run_sweep(spec, base))
        )
        display_sweep_table(result)

        stem = f"sweep_{var.value}"
        write_sweep_csv(result, hc.out_dir / f"{stem}.csv")
        write_aggregate_csv(result, hc.out_dir / f"{stem}_aggregate.csv")
        if plot:
            series = [
                Series(
                    scheme.value,
                    [a.sweep_value for a in result.aggregates if a.scheme == scheme],
                    [
                        a.mean_power_dbm if a.mean_power_dbm is not None else math.nan
                        for a in result.aggregates
                        if a.scheme == scheme
                    ],
                )
                for scheme in spec.schemes
            ]
            write_plot(
                hc.out_dir / f"{stem}.svg",
                series,
                title=f"Transmit power versus {var.value}",
                x_label=var.value,
                y_label="mean power (dBm)",
            )
        console.print(f"[green]Results written to:[/green] {hc.out_dir}")
        if result.all_infeasible:
            console.print("[red]Every trial was infeasible[/red]")
            raise typer.Exit(code=EXIT_ALL_INFEASIBLE)


@app.command()
def outage(
    ctx: typer.Context,
    values: str = typer.Option("0,5,10,15,20", "--values", help="Radar thresholds r_r (dB)"),
    trials: Optional[int] = typer.Option(None, "--trials", "-n", help="Trials per threshold", min=1),
    plot: bool = typer.Option(True, "--plot/--no-plot", help="Write an SVG plot"),
) -> None:
    """
    Outage probability of the joint and comm-only SDR schemes.

    Needs a finite cross_corr_limit; the `outage` preset provides one.

    Examples:
        python main.py --preset outage outage --values 0,5,10,15 --trials 200
    """
    state = _state(ctx)
    with exit_codes():
        cfg = state.scenario()
        hc = state.harness_config()
        r_values = parse_values(values)
        runner = ExperimentRunner(hc, backend=state.backend())
        curve = asyncio.run(
            _with_progress("Estimating outage", runner.run_outage(cfg, r_values, trials))
        )

        table = Table(title="Outage probability", show_header=True, header_style="bold cyan")
        table.add_column("Scheme", style="dim")
        table.add_column("r_r (dB)", justify="right")
        table.add_column("Outage", justify="right")
        table.add_column("95% CI", justify="center")
        table.add_column("Failed", justify="right")
        for point in curve.points:
            if point.outage is None:
                estimate, interval = "n/a", "n/a"
            else:
                estimate = f"{point.infeasible}/{point.decided} ({point.outage:.3f})"
                interval = f"[{point.ci_low:.3f}, {point.ci_high:.3f}]"
            table.add_row(
                point.scheme.value,
                f"{point.r_r_th_db:g}",
                estimate,
                interval,
                str(point.failed),
            )
        console.print(table)

        write_outage_csv(curve, hc.out_dir / "outage.csv")
        if plot:
            schemes = list(dict.fromkeys(p.scheme for p in curve.points))
            series = [
                Series(
                    s.value,
                    [p.r_r_th_db for p in curve.series(s)],
                    [math.nan if p.outage is None else p.outage for p in curve.series(s)],
                )
                for s in schemes
            ]
            write_plot(
                hc.out_dir / "outage.svg",
                series,
                title="Outage probability versus radar threshold",
                x_label="r_r (dB)",
                y_label="outage",
            )
        console.print(f"[green]Results written to:[/green] {hc.out_dir}")
        if curve.points and all(p.decided and p.infeasible == p.decided for p in curve.points):
            raise typer.Exit(code=EXIT_ALL_INFEASIBLE)


@app.command()
def beampattern(
    ctx: typer.Context,
    eps: Optional[str] = typer.Option(
        None, "--eps", help="Comma-separated cross-correlation limits (inf allowed)"
    ),
    plot: bool = typer.Option(True, "--plot/--no-plot", help="Write an SVG plot"),
) -> None:
    """
    Transmit beampattern and cross-correlation coefficients per limit.

    Examples:
        python main.py beampattern --eps 0.1,10,inf
    """
    state = _state(ctx)
    with exit_codes():
        cfg = state.scenario()
        hc = state.harness_config()
        eps_values = parse_values(eps) if eps else None
        runner = ExperimentRunner(hc, backend=state.backend())
        records = asyncio.run(
            _with_progress("Solving beampatterns", runner.run_beampattern(cfg, eps_values))
        )

        table = Table(title="Cross-correlation", show_header=True, header_style="bold cyan")
        table.add_column("eps", style="dim")
        table.add_column("Feasible", justify="center")
        table.add_column("Sum |a_i^H R a_j|^2", justify="right")
        table.add_column("Max coefficient", justify="right")
        for record in records:
            if record.feasible:
                write_beampattern_csv(record, hc.out_dir / f"beampattern_eps_{eps_tag(record.eps_th)}.csv")
            top = max(record.coefficients.values()) if record.coefficients else None
            table.add_row(
                eps_tag(record.eps_th),
                "[green]yes[/green]" if record.feasible else "[red]no[/red]",
                f"{record.cross_correlation:.4g}" if record.cross_correlation is not None else "-",
                f"{top:.4f}" if top is not None else "-",
            )
        console.print(table)

        write_xcorr_csv(records, cfg.target_angles, hc.out_dir / "xcorr.csv")
        if plot:
            series = [
                Series(f"eps={eps_tag(r.eps_th)}", r.theta_deg, r.power_normalized_db)
                for r in records
                if r.feasible
            ]
            write_plot(
                hc.out_dir / "beampattern.svg",
                series,
                title="Normalized transmit beampattern",
                x_label="angle (deg)",
                y_label="normalized power (dB)",
            )
        console.print(f"[green]Results written to:[/green] {hc.out_dir}")
        if records and not any(r.feasible for r in records):
            raise typer.Exit(code=EXIT_ALL_INFEASIBLE)


@app.command()
def convergence(
    ctx: typer.Context,
    algorithm: Algorithm = typer.Option(Algorithm.PENALTY, "--algorithm", "-a", help="penalty or sdr"),
    m_values: Optional[str] = typer.Option(
        None, "--m-values", help="Comma-separated IRS sizes (default: the scenario's M)"
    ),
    plot: bool = typer.Option(True, "--plot/--no-plot", help="Write an SVG plot"),
) -> None:
    """
    Per-iteration objective, violation and power traces.

    Examples:
        python main.py convergence --algorithm penalty --m-values 50,75,100
        python main.py convergence --algorithm sdr
    """
    state = _state(ctx)
    with exit_codes():
        cfg = state.scenario()
        hc = state.harness_config()
        sizes = [int(m) for m in parse_values(m_values)] if m_values else None
        runner = ExperimentRunner(hc, backend=state.backend())
        traces = asyncio.run(
            _with_progress(
                f"Tracing {algorithm.value}", runner.run_convergence(cfg, algorithm, sizes)
            )
        )

        table = Table(title="Convergence", show_header=True, header_style="bold cyan")
        table.add_column("M", style="dim")
        table.add_column("Iterations", justify="right")
        table.add_column("Final power", justify="right")
        table.add_column("Status", justify="center")
        for trace in traces:
            table.add_row(
                str(trace.n_irs),
                str(max(len(trace.objective), len(trace.power_w))),
                _dbm(trace.power_w[-1]) if trace.power_w else "-",
                trace.status.value,
            )
        console.print(table)

        write_convergence_csv(traces, hc.out_dir / f"convergence_{algorithm.value}.csv")
        if plot:
            key = "violation" if algorithm == Algorithm.PENALTY else "power_w"
            series = []
            for trace in traces:
                ys = list(getattr(trace, key))
                if key == "violation":
                    ys = [math.log10(y) if y > 0 else math.nan for y in ys]
                series.append(Series(f"M={trace.n_irs}", list(range(len(ys))), ys))
            write_plot(
                hc.out_dir / f"convergence_{algorithm.value}.svg",
                series,
                title=f"Convergence of the {algorithm.value} algorithm",
                x_label="iteration",
                y_label="log10 violation" if key == "violation" else "power (W)",
            )
        console.print(f"[green]Results written to:[/green] {hc.out_dir}")


@app.command()
def version() -> None:
    """Show version information."""
    console.print(
        Panel(
            "[bold]IRS Radcom[/bold]\n"
            "Joint transmit and IRS phase-shift beamforming\n\n"
            "Version: 0.1.0\n"
            "Algorithms: two-layer penalty (Case I), SDR alternating optimization (Case II)\n"
            "Conic backends: interior_point, cvxpy (optional)",
            title="Version Info",
            border_style="blue",
        )
    )


# =============================================================================
# MAIN ENTRY POINT
# =============================================================================


def main() -> None:
    """Main entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
