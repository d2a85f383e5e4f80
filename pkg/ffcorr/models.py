"""
Pydantic models for data flowing through the library and the CLI.

Numeric payloads (term matrices, basis vectors) are stored as read-only
numpy arrays; site indices are 1-based everywhere, term indices are the
0-based position of the term in ``HamiltonianSpec.terms``.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ffcorr.errors import DomainError, ModelFormatError


def _frozen_array(value, dtype=complex) -> np.ndarray:
    array = np.array(value, dtype=dtype)
    array.setflags(write=False)
    return array


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ── Hamiltonian description ──────────────────────────────────────────────────

class TermSpec(_ArrayModel):
    """One Hamiltonian term: a dense matrix on the tensor factor of its support."""
    sites: tuple[int, ...] = Field(description="Ordered 1-based site indices; first site is the most significant digit")
    matrix: np.ndarray = Field(description="Complex s^k x s^k matrix, row-major")
    projector: bool = Field(default=True, description="Term is expected to satisfy H_i^2 = H_i")

    @field_validator("matrix", mode="before")
    @classmethod
    def _complex_matrix(cls, value):
        return _frozen_array(value)


class HamiltonianSpec(_ArrayModel):
    """Sites on a 1D line carrying a list of local terms."""
    n: int = Field(description="Number of sites")
    s: int = Field(default=2, description="Local dimension per site")
    r: int = Field(default=2, description="Interaction range")
    positions: tuple[int, ...] = Field(default=(), description="Integer coordinate per site")
    terms: tuple[TermSpec, ...] = Field(default=())

    @model_validator(mode="before")
    @classmethod
    def _default_positions(cls, data):
        if isinstance(data, dict) and not data.get("positions") and "n" in data:
            data = {**data, "positions": tuple(range(1, int(data["n"]) + 1))}
        return data

    @model_validator(mode="after")
    def _check_structure(self) -> "HamiltonianSpec":
        if self.n < 1:
            raise ModelFormatError(f"site count must be positive, got {self.n}")
        if self.s < 2:
            raise ModelFormatError(f"local dimension must be at least 2, got {self.s}")
        if len(self.positions) != self.n:
            raise ModelFormatError(f"expected {self.n} positions, got {len(self.positions)}")
        for index, term in enumerate(self.terms):
            if not term.sites:
                raise ModelFormatError("empty support", term_index=index)
            if len(set(term.sites)) != len(term.sites):
                raise ModelFormatError(f"repeated site in support {term.sites}", term_index=index)
            bad = [site for site in term.sites if not 1 <= site <= self.n]
            if bad:
                raise ModelFormatError(f"sites {bad} outside 1..{self.n}", term_index=index)
            size = self.s ** len(term.sites)
            if term.matrix.shape != (size, size):
                raise ModelFormatError(
                    f"matrix shape {term.matrix.shape} does not match support of {len(term.sites)} sites (expected {size}x{size})",
                    term_index=index,
                )
        return self

    @property
    def dim(self) -> int:
        return self.s ** self.n

    def distance(self, sites_a, sites_b) -> int:
        """Lattice distance between two supports: min |pos_a - pos_b|."""
        return min(abs(self.positions[a - 1] - self.positions[b - 1]) for a in sites_a for b in sites_b)

    def diameter(self, sites) -> int:
        coords = [self.positions[site - 1] for site in sites]
        return max(coords) - min(coords)


class LocalObservable(_ArrayModel):
    """Operator acting on a few sites, e.g. a number operator or a Pauli matrix."""
    sites: tuple[int, ...]
    matrix: np.ndarray
    label: str = ""

    @field_validator("matrix", mode="before")
    @classmethod
    def _complex_matrix(cls, value):
        return _frozen_array(value)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, ord=2))


# ── Validation ───────────────────────────────────────────────────────────────

class ViolationKind(str, Enum):
    NOT_HERMITIAN = "not_hermitian"
    MIN_EIGENVALUE = "min_eigenvalue"
    NORM = "norm"
    DIAMETER = "diameter"
    DUPLICATE_SUPPORT = "duplicate_support"
    NOT_PROJECTOR = "not_projector"
    FRUSTRATED = "frustrated"


class Violation(BaseModel):
    term_index: Optional[int] = None
    kind: ViolationKind
    detail: str = ""


class ValidationReport(BaseModel):
    valid: bool = True
    violations: list[Violation] = Field(default_factory=list)


# ── Interaction graph & layers ───────────────────────────────────────────────

class InteractionGraph(BaseModel):
    """One vertex per term, an edge per non-commuting pair."""
    model_config = ConfigDict(frozen=True)

    n_terms: int
    edges: tuple[tuple[int, int], ...] = ()
    g: int = 0

    def to_networkx(self):
        import networkx as nx

        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_terms))
        graph.add_edges_from(self.edges)
        return graph


class LayerSchedule(BaseModel):
    """Coloring of terms into c layers and the order in which layers act on kets."""
    model_config = ConfigDict(frozen=True)

    c: int
    assignment: tuple[int, ...] = Field(description="Color in 1..c for each term index")
    order: tuple[int, ...] = Field(default=(), description="Colors in application order; default ascending")

    @model_validator(mode="before")
    @classmethod
    def _default_order(cls, data):
        if isinstance(data, dict) and not data.get("order") and "c" in data:
            data = {**data, "order": tuple(range(1, int(data["c"]) + 1))}
        return data

    def layer(self, color: int) -> list[int]:
        return [index for index, assigned in enumerate(self.assignment) if assigned == color]

    def reversed(self) -> "LayerSchedule":
        return LayerSchedule(c=self.c, assignment=self.assignment, order=tuple(reversed(self.order)))


# ── Spectral results ─────────────────────────────────────────────────────────

class NormEstimate(BaseModel):
    value: float
    iterations: int = 0


class Eigenpairs(_ArrayModel):
    values: np.ndarray
    vectors: np.ndarray = Field(description="Eigenvectors as columns")
    residuals: tuple[float, ...] = ()
    method: str = "dense"


class GroundSpaceBasis(_ArrayModel):
    """Orthonormal zero-energy vectors (columns) and the spectral gap above them."""
    vectors: np.ndarray
    degeneracy: int
    gap: float
    zero_tol: float

    def projector(self):
        from ffcorr.services.linalg import BasisProjector

        return BasisProjector(self.vectors)


class GapRatioReport(BaseModel):
    a: float
    epsilon: float
    epsilon_projector: float
    passed: bool


# ── Detectability lemma ──────────────────────────────────────────────────────

class DLReport(BaseModel):
    epsilon: float
    g: int
    c: int
    dl_norm: float
    bound: float
    margin: float
    passed: bool
    delta: float
    pp_min: float = Field(description="Smallest eigenvalue of P^dag P - G")
    pp_max: float = Field(description="Largest eigenvalue of P^dag P - G")
    pp_upper: float = Field(description="1 - delta")
    pp_passed: bool


class RemarkRow(BaseModel):
    q: float
    n: int
    epsilon: float
    dl_norm: float
    residual: float
    bound: float
    passed: bool
    reversed_dl_norm: Optional[float] = None
    reversed_residual: Optional[float] = None


# ── AGSP ─────────────────────────────────────────────────────────────────────

class ChebyshevParams(BaseModel):
    """Degree and gap parameter of the shifted, rescaled Chebyshev polynomial."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=0)
    delta: float

    @model_validator(mode="after")
    def _check_delta(self) -> "ChebyshevParams":
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        return self

    @property
    def argument_at_one(self) -> float:
        return 2.0 / (1.0 - self.delta) - 1.0

    @property
    def normalization(self) -> float:
        from ffcorr.services.agsp import chebyshev_T

        return chebyshev_T(self.m, self.argument_at_one)

    @property
    def bound(self) -> float:
        return 2.0 * math.exp(-2.0 * self.m * math.sqrt(self.delta))


class AgspRow(BaseModel):
    m: int
    delta: float
    bound: float
    measured_norm: float
    margin: float
    passed: bool


class ScalarBoundRow(BaseModel):
    m: int
    delta: float
    max_abs: float
    bound: float
    passed: bool


class ConeRow(BaseModel):
    m: int
    state_index: int
    residual: float
    guaranteed: bool
    holds: bool


class CausalConeReport(BaseModel):
    distance: int
    c: int
    r: int
    m_admissible: int = Field(description="Largest m with m < d/((2c-1)(r-1))")
    rows: list[ConeRow] = Field(default_factory=list)
    passed: bool = True
    first_failure_m: Optional[int] = None


class CorrelatorBoundReport(BaseModel):
    m: int
    distance: int
    correlator: float
    bound: float
    passed: bool


# ── Correlations ─────────────────────────────────────────────────────────────

class XiFit(BaseModel):
    xi: float
    amplitude: float
    r_squared: float
    window: tuple[int, ...] = ()


class CorrelationSeries(BaseModel):
    """Correlator magnitudes against distance, with an optional reference curve and fit."""
    a_label: str = ""
    b_label: str = ""
    distances: tuple[int, ...]
    values: tuple[float, ...]
    reference: Optional[tuple[float, ...]] = None
    fit: Optional[XiFit] = None

    @model_validator(mode="after")
    def _check_distances(self) -> "CorrelationSeries":
        if len(self.distances) != len(self.values):
            raise ValueError("distances and values differ in length")
        if any(b <= a for a, b in zip(self.distances, self.distances[1:])):
            raise ValueError("distances must be strictly increasing")
        return self


class TheoremBoundRow(BaseModel):
    d: int
    value: float
    bound: float
    passed: bool


class SweepRow(BaseModel):
    q: float
    epsilon: float
    xi_fit: float
    xi_lower: float
    xi_upper: float
    passed: bool


class SweepResult(BaseModel):
    rows: list[SweepRow] = Field(default_factory=list)
    slope: float
    slope_passed: bool


class EntropyRow(BaseModel):
    q: float
    n: int
    cut: int
    epsilon: float
    inv_sqrt_epsilon: float
    entropy: float


# ── CLI ──────────────────────────────────────────────────────────────────────

class Command(str, Enum):
    VALIDATE = "validate"
    DL = "dl"
    REMARK = "remark"
    AGSP = "agsp"
    CONE = "cone"
    CORR = "corr"
    SWEEP = "sweep"
    ENTROPY = "entropy"


class OutputFormat(str, Enum):
    CSV = "csv"
    XLSX = "xlsx"


class RunConfig(BaseModel):
    """Everything that determines a CLI run's output."""
    command: Command
    model: str = "xxz"
    file: Optional[str] = None
    q: float = 0.5
    n: int = 4
    q_grid: tuple[float, ...] = ()
    n_grid: tuple[int, ...] = ()
    m_grid: tuple[int, ...] = ()
    a: int = 1
    b: Optional[int] = None
    m_max: int = 2
    cut: Optional[int] = None
    tol: Optional[float] = None  # None: each check uses its configured tolerance
    seed: int = 1234
    threads: int = 1
    out: Optional[str] = None
    fmt: OutputFormat = OutputFormat.CSV
    force: bool = False
    reverse: bool = False
    preset: Optional[str] = None

    @field_validator("tol")
    @classmethod
    def _positive_tol(cls, value):
        if value is not None and value <= 0:
            raise ValueError("tolerance must be positive")
        return value

    @field_validator("threads")
    @classmethod
    def _positive_threads(cls, value):
        if value < 1:
            raise ValueError("threads must be at least 1")
        return value

    def effective_q_grid(self) -> tuple[float, ...]:
        return self.q_grid or (self.q,)

    def effective_n_grid(self) -> tuple[int, ...]:
        return self.n_grid or (self.n,)

    def fingerprint(self) -> str:
        """Stable hash of everything that influences output rows."""
        import hashlib

        payload = self.model_dump_json(exclude={"out", "threads"})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
