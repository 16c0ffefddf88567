"""
Domain models for the Sitnikov toolkit.
"""

import math
from enum import Enum
from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, field_validator, model_validator

from .errors import InadmissibleFrequency

# Half of the primaries' separation when the primaries move on a circle.
R0 = 0.5

# Infimum of the period function: small oscillations have frequency sqrt(8).
MIN_PERIOD = 2.0 * math.pi / math.sqrt(8.0)


class IntegratorConfig(BaseModel):
    """Tolerances and limits shared by every integration."""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=1e-12, gt=0)
    rel_tol: float = Field(default=1e-12, gt=0)
    max_step: float = Field(default=math.inf, gt=0)
    max_steps: int = Field(default=1_000_000, gt=0)

    def halved(self) -> "IntegratorConfig":
        """Copy with both tolerances halved, used for self-convergence checks."""
        return self.model_copy(update={"abs_tol": self.abs_tol / 2, "rel_tol": self.rel_tol / 2})


class PhaseState(BaseModel):
    """A point (t, x, v) on a trajectory of a second-order scalar equation."""

    model_config = ConfigDict(frozen=True)

    t: FiniteFloat
    x: FiniteFloat
    v: FiniteFloat

    @classmethod
    def from_vector(cls, t: float, y: np.ndarray) -> "PhaseState":
        return cls(t=float(t), x=float(y[0]), v=float(y[1]))

    def as_vector(self) -> np.ndarray:
        return np.array([self.x, self.v], dtype=float)


EventFunction = Callable[[float, np.ndarray], float]


class EventSpec(BaseModel):
    """A scalar event g(t, y) = 0 located along a trajectory."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    event_fn: EventFunction
    direction: Literal[-1, 0, 1] = 0
    nth: int = Field(default=1, ge=1, description="Which crossing to return (1 = first)")
    horizon: float = Field(default=1000.0, gt=0, description="Time budget after t0")


class Parity(str, Enum):
    """Time symmetry of a periodic orbit."""

    ODD = "odd"
    EVEN = "even"


class StabilityClass(str, Enum):
    """Linear stability type read off a 2x2 monodromy matrix."""

    ELLIPTIC = "Elliptic"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC_STABLE = "ParabolicStable"
    PARABOLIC_UNSTABLE = "ParabolicUnstable"
    PARABOLIC_UNDETERMINED = "ParabolicUndetermined"


class FrequencyPair(BaseModel):
    """Integers (m, p): a 2m*pi-periodic orbit with 2p zeros per period."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    p: int = Field(ge=1)

    @classmethod
    def of(cls, m: int, p: int) -> "FrequencyPair":
        """Build a pair and reject it unless it is admissible."""
        pair = cls(m=m, p=p)
        pair.check_admissible()
        return pair

    @property
    def rho(self) -> float:
        """Rotation number p/m."""
        return self.p / self.m

    @property
    def bound(self) -> int:
        """floor(sqrt(8) m), computed exactly."""
        return math.isqrt(8 * self.m * self.m)

    @property
    def is_admissible(self) -> bool:
        return self.p <= self.bound

    @property
    def is_resonant(self) -> bool:
        """True when m/(2p) is an integer, the only case with a nonzero slope."""
        return self.m % (2 * self.p) == 0

    @property
    def resonance_index(self) -> Optional[int]:
        return self.m // (2 * self.p) if self.is_resonant else None

    @property
    def orbit_period(self) -> float:
        """Minimal period 2m*pi/p of the circular orbit."""
        return 2.0 * math.pi * self.m / self.p

    def check_admissible(self) -> None:
        if not self.is_admissible:
            raise InadmissibleFrequency(self.m, self.p, self.bound)

    def __str__(self) -> str:
        return f"({self.m},{self.p})"


class CircularOrbit(BaseModel):
    """One energy level of the circular problem."""

    model_config = ConfigDict(frozen=True)

    h: float = Field(gt=-2.0, lt=0.0)
    eta: float = Field(gt=0.0, lt=2.0)
    xi: float = Field(gt=0.0)
    T: float = Field(gt=MIN_PERIOD)
    Tprime: float

    @field_validator("Tprime")
    @classmethod
    def _period_increases(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"period derivative must be positive, got {value}")
        return value


class Monodromy2x2(BaseModel):
    """Poincare matrix [[a, b], [c, d]] of a Hill equation over an interval."""

    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float
    d: float
    length: float = Field(description="Interval length the matrix propagates over")

    @classmethod
    def from_array(cls, matrix: np.ndarray, length: float) -> "Monodromy2x2":
        return cls(
            a=float(matrix[0, 0]),
            b=float(matrix[0, 1]),
            c=float(matrix[1, 0]),
            d=float(matrix[1, 1]),
            length=float(length),
        )

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


class PsiIdentityReport(BaseModel):
    """Largest deviations of the fundamental solutions from their closed forms."""

    eta: float
    samples: int
    psi1_residual: float
    psi1dot_residual: float
    psi2_residual: float
    psi1_tol: float = 1e-8
    psi2_tol: float = 1e-5

    @property
    def passed(self) -> bool:
        return (
            max(self.psi1_residual, self.psi1dot_residual) <= self.psi1_tol
            and self.psi2_residual <= self.psi2_tol
        )


class HalfPeriodStructure(BaseModel):
    """Poincare matrix over n half periods of an odd circular orbit."""

    eta: float
    n: int = Field(ge=1)
    monodromy: Monodromy2x2
    b_hat: float = Field(description="psi_2(T/2)")
    b_n: float = Field(description="psi_2(nT/2)")
    b_n_expected: float = Field(description="(-1)^(n+1) n (eta^2/2) T'(h)")
    structure_residual: float
    relation_residual: float
    period_residual: float


class SlopeReport(BaseModel):
    """Trace slope at e = 0 for one symmetric family, with its ingredients."""

    mp: FrequencyPair
    parity: Parity
    h: float
    eta: float
    xi: float
    period: float
    tau_prime: float
    tau_prime_raw: float = Field(description="Slope from the F23-weighted velocity integral")
    integral_Gcos: float
    Tprime: float
    A_n: Optional[float] = None
    verdict: StabilityClass
    abs_tol: float
    rel_tol: float


class VanishingReport(BaseModel):
    """Slope of a non-resonant family, expected to vanish."""

    mp: FrequencyPair
    parity: Parity
    residual: float = Field(description="|tau'(0)|")
    tolerance: float
    g_period: float = Field(description="Minimal period m*pi/p of G")
    explanation: str


class ContinuationPoint(BaseModel):
    """A shot symmetric orbit of the elliptic problem and its 2m*pi monodromy."""

    e: float = Field(ge=0.0, lt=1.0)
    mp: FrequencyPair
    parity: Parity
    shoot_param: float = Field(description="eta(e) for odd families, xi(e) for even ones")
    tau: float
    cls: StabilityClass
    monodromy: Monodromy2x2
    residual: float
    iterations: int
    symmetry_residual: float

    @property
    def det(self) -> float:
        return self.monodromy.det


class ReferenceRow(BaseModel):
    """One published row (n, eta_n, h_n, A_n)."""

    n: int = Field(ge=1)
    eta: float
    h: float
    A: float


class ReferenceTable(BaseModel):
    """Versioned set of published reference rows."""

    version: int = Field(ge=1)
    tolerance: float = Field(gt=0)
    rows: List[ReferenceRow]

    def find(self, n: int) -> Optional[ReferenceRow]:
        for row in self.rows:
            if row.n == n:
                return row
        return None


class ProvenanceRow(BaseModel):
    """Base for serialized rows: every row records the tolerances used."""

    abs_tol: float
    rel_tol: float


class ScanRow(ProvenanceRow):
    """One row of the A_n scan."""

    n: int
    eta: float
    h: float
    A_n: float
    sign: int
    certificate: Optional[float] = None
    certified: Optional[bool] = None
    odd_verdict: StabilityClass
    even_verdict: StabilityClass
    ref_eta: Optional[float] = None
    ref_h: Optional[float] = None
    ref_A: Optional[float] = None
    dev_eta: Optional[float] = None
    dev_h: Optional[float] = None
    dev_A: Optional[float] = None


class PeriodRow(ProvenanceRow):
    h: float
    eta: float
    xi: float
    T: float
    Tprime: float


class StructureRow(ProvenanceRow):
    """Half-period Poincare matrix along an odd circular orbit."""

    eta: float
    n: int
    a: float
    b_n: float
    c: float
    d: float
    b_n_expected: float
    structure_residual: float
    relation_residual: float
    period_residual: float


class SlopeRow(ProvenanceRow):
    m: int
    p: int
    parity: Parity
    h: float
    eta: float
    xi: float
    Tprime: float
    integral_Gcos: float
    tau_prime: float
    tau_prime_raw: float
    A_n: Optional[float] = None
    verdict: StabilityClass


class ContinuationRow(ProvenanceRow):
    e: float
    m: int
    p: int
    parity: Parity
    shoot_param: float
    tau: float
    det: float
    cls: StabilityClass
    residual: float
    iterations: int


Command = Literal["table1", "scan", "slope", "continue", "period", "structure"]
OutputFormat = Literal["csv", "json", "markdown"]


class RunConfig(BaseModel):
    """One validated CLI invocation."""

    command: Command
    m: Optional[int] = None
    p: Optional[int] = None
    n_max: Optional[int] = None
    parity: Parity = Parity.ODD
    e_values: List[float] = Field(default_factory=list)
    h_values: List[float] = Field(default_factory=list)
    T_values: List[float] = Field(default_factory=list)
    eta: Optional[float] = None
    tolerances: IntegratorConfig = Field(default_factory=IntegratorConfig)
    output_format: OutputFormat = "csv"
    output_path: Optional[str] = None
    workers: Optional[int] = Field(default=None, ge=1, description="None: use the worker cap")

    @model_validator(mode="after")
    def _check_arguments(self) -> "RunConfig":
        if self.command in ("table1", "scan", "structure"):
            if self.n_max is None or self.n_max < 1:
                raise ValueError(f"'{self.command}' needs --n-max >= 1")
        if self.command == "structure":
            if self.eta is None or not 0.0 < self.eta < 2.0:
                raise ValueError("'structure' needs --eta in (0, 2)")
        if self.command in ("slope", "continue"):
            if self.m is None or self.p is None:
                raise ValueError(f"'{self.command}' needs --m and --p")
            pair = FrequencyPair(m=self.m, p=self.p)
            if not pair.is_admissible:
                raise ValueError(f"p must not exceed floor(sqrt(8) m) = {pair.bound}")
        if self.command == "continue":
            if not self.e_values:
                raise ValueError("'continue' needs a non-empty --e list")
            if any(not 0.0 <= e < 1.0 for e in self.e_values):
                raise ValueError("eccentricities must lie in [0, 1)")
            if any(b < a for a, b in zip(self.e_values, self.e_values[1:])):
                raise ValueError("eccentricities must be sorted ascending")
        if self.command == "period":
            if bool(self.h_values) == bool(self.T_values):
                raise ValueError("'period' needs exactly one of --h or --T")
            if any(not -2.0 < h < 0.0 for h in self.h_values):
                raise ValueError("energies must lie in (-2, 0)")
            if any(T <= MIN_PERIOD for T in self.T_values):
                raise ValueError(f"target periods must exceed {MIN_PERIOD:.6f}")
        return self

    @property
    def pair(self) -> FrequencyPair:
        assert self.m is not None and self.p is not None
        return FrequencyPair(m=self.m, p=self.p)
