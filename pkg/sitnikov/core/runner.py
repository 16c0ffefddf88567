"""
Command orchestrator: turns a validated RunConfig into result rows and a
serialized report.
"""

import functools
import logging
from typing import TYPE_CHECKING, List, Optional, Sequence

from pydantic import BaseModel

if TYPE_CHECKING:
    from ..reporting.base import ReportWriter

from ..analysis.continuation import trace_along_family
from ..analysis.slopes import conjecture_scan, slope_for
from ..problems import circular
from ..reporting.base import writer_registry
from .errors import NewtonDiverged
from .hill import half_period_structure
from .models import (
    ContinuationPoint,
    ContinuationRow,
    IntegratorConfig,
    PeriodRow,
    RunConfig,
    SlopeRow,
    StructureRow,
)
from .parallel import ordered_map, resolve_workers
from .reference import load_reference

logger = logging.getLogger(__name__)

TITLES = {
    "table1": "Odd (2n, 1) orbits against the reference table",
    "scan": "A_n scan",
    "slope": "Trace slope at e = 0",
    "continue": "Continuation in eccentricity",
    "period": "Period function",
    "structure": "Half-period Poincare matrices",
}


def period_row(h: float, cfg: IntegratorConfig) -> PeriodRow:
    orbit = circular.circular_orbit(h, cfg)
    return PeriodRow(
        h=orbit.h,
        eta=orbit.eta,
        xi=orbit.xi,
        T=orbit.T,
        Tprime=orbit.Tprime,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
    )


def period_row_for_target(T_target: float, cfg: IntegratorConfig) -> PeriodRow:
    return period_row(circular.solve_energy_for_period(T_target, cfg), cfg)


def structure_row(n: int, eta: float, cfg: IntegratorConfig) -> StructureRow:
    result = half_period_structure(eta, n, cfg)
    mono = result.monodromy
    return StructureRow(
        eta=eta,
        n=n,
        a=mono.a,
        b_n=mono.b,
        c=mono.c,
        d=mono.d,
        b_n_expected=result.b_n_expected,
        structure_residual=result.structure_residual,
        relation_residual=result.relation_residual,
        period_residual=result.period_residual,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
    )


def continuation_row(point: ContinuationPoint, cfg: IntegratorConfig) -> ContinuationRow:
    return ContinuationRow(
        e=point.e,
        m=point.mp.m,
        p=point.mp.p,
        parity=point.parity,
        shoot_param=point.shoot_param,
        tau=point.tau,
        det=point.det,
        cls=point.cls,
        residual=point.residual,
        iterations=point.iterations,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
    )


class PartialResult(NewtonDiverged):
    """A sweep failed part way; ``report`` holds the rows computed before."""

    def __init__(self, cause: NewtonDiverged, report: str) -> None:
        super().__init__(str(cause), cause.points)
        self.report = report


class SitnikovRunner:
    """Runs one command and serializes its rows."""

    def __init__(self, output_format: str = "csv") -> None:
        self.output_format = output_format

        # Lazy load the writer so an unknown format fails at first use
        self._writer: Optional["ReportWriter"] = None

    @property
    def writer(self) -> "ReportWriter":
        """Get the writer instance, loading it if necessary."""
        if self._writer is None:
            self._writer = writer_registry.get(self.output_format)
        return self._writer

    def rows(self, config: RunConfig) -> List[BaseModel]:
        """
        Compute the rows of one command.

        Args:
            config: Validated invocation

        Returns:
            Result rows in input order
        """
        cfg = config.tolerances
        workers = resolve_workers(config.workers)

        if config.command in ("table1", "scan"):
            return list(
                conjecture_scan(
                    config.n_max,
                    cfg,
                    reference=load_reference(),
                    workers=workers,
                    certify=config.command == "scan",
                )
            )

        if config.command == "slope":
            report = slope_for(config.pair, config.parity, cfg)
            return [
                SlopeRow(
                    m=report.mp.m,
                    p=report.mp.p,
                    parity=report.parity,
                    h=report.h,
                    eta=report.eta,
                    xi=report.xi,
                    Tprime=report.Tprime,
                    integral_Gcos=report.integral_Gcos,
                    tau_prime=report.tau_prime,
                    tau_prime_raw=report.tau_prime_raw,
                    A_n=report.A_n,
                    verdict=report.verdict,
                    abs_tol=cfg.abs_tol,
                    rel_tol=cfg.rel_tol,
                )
            ]

        if config.command == "continue":
            points = trace_along_family(config.pair, config.parity, config.e_values, cfg)
            return [continuation_row(point, cfg) for point in points]

        if config.command == "period":
            if config.h_values:
                fn = functools.partial(period_row, cfg=cfg)
                return list(ordered_map(fn, config.h_values, workers))
            fn = functools.partial(period_row_for_target, cfg=cfg)
            return list(ordered_map(fn, config.T_values, workers))

        if config.command == "structure":
            fn = functools.partial(structure_row, eta=config.eta, cfg=cfg)
            return list(ordered_map(fn, range(1, config.n_max + 1), workers))

        raise ValueError(f"Unknown command: {config.command}")

    def render(self, rows: Sequence[BaseModel], command: str) -> str:
        return self.writer.render(rows, title=TITLES.get(command, ""))

    def run(self, config: RunConfig) -> str:
        """
        Compute and serialize one command.

        Raises:
            PartialResult: a continuation sweep lost its family; the rows
                computed before the failure are serialized in ``report``
        """
        logger.info("running %s", config.command)
        try:
            rows = self.rows(config)
        except NewtonDiverged as exc:
            if config.command != "continue" or not exc.points:
                raise
            cfg = config.tolerances
            partial = [continuation_row(point, cfg) for point in exc.points]
            raise PartialResult(exc, self.render(partial, config.command)) from exc
        return self.render(rows, config.command)

    def list_available_formats(self) -> List[str]:
        """List all registered output formats."""
        return writer_registry.list_formats()


def write_report(text: str, output_path: Optional[str] = None) -> None:
    """Write a report to a file, or to stdout when no path is given."""
    if output_path is None:
        print(text, end="")
        return
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
