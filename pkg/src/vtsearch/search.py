"""End-to-end searches: encode, solve, decode, verify, and connectivity sweeps."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

from .decoder import Witness, decode_witness
from .encoder import Encoding, encode_problem
from .model import DropSemantics, SearchConfig
from .solver import SolverResult, Status, solve
from .verifier import VerifierReport, verify_witness


class VerificationError(RuntimeError):
    """A solver model decoded to a witness that fails the semantic checks."""

    def __init__(self, report: VerifierReport):
        super().__init__("witness failed verification: " + ", ".join(report.failed()))
        self.report = report


@dataclass
class SearchOutcome:
    config: SearchConfig
    encoding: Encoding
    result: SolverResult
    witness: Witness | None = None
    report: VerifierReport | None = None
    parts: list[tuple[int, Status, float]] = field(default_factory=list)  # (cut_side, ...)
    seconds: float = 0.0

    @property
    def status(self) -> Status:
        return self.result.status


def splits_by_cut(cfg: SearchConfig) -> bool:
    return (cfg.connectivity_query and cfg.drop_semantics is DropSemantics.UNDIRECTED
            and cfg.symmetry_breaking and cfg.cut_side is None)


def _solve_one(cfg, seed, backend, enc, time_limit) -> SearchOutcome:
    res = solve(enc.cnf, time_limit=time_limit, seed=seed, backend=backend)
    out = SearchOutcome(cfg, enc, res, seconds=res.stats.get("wall_seconds", 0.0))
    if res.status is Status.SAT:
        out.witness = decode_witness(res.assignment, enc.varmap, cfg)
        out.report = verify_witness(out.witness, cfg)
        if not out.report.passed:
            raise VerificationError(out.report)
    return out


def run_search(cfg: SearchConfig, seed: int = 0, backend: str | None = None,
               encoding: Encoding | None = None) -> SearchOutcome:
    """Solve one configuration.  Sat witnesses are always verified.

    An undirected drop query with symmetry breaking is solved as one
    sub-query per size k <= nodes/2 of the smaller residual side, relabelled
    to nodes 0..k-1.  Any split graph can be relabelled that way, and each
    sub-query is far easier to refute than the open one.  ``cfg.time_limit``
    covers all sub-queries together.
    """
    if encoding is not None or not splits_by_cut(cfg):
        return _solve_one(cfg, seed, backend, encoding or encode_problem(cfg), cfg.time_limit)
    start = time.monotonic()
    parts: list[tuple[int, Status, float]] = []
    for k in range(1, cfg.num_nodes // 2 + 1):
        left = None
        if cfg.time_limit is not None:
            left = max(0.0, cfg.time_limit - (time.monotonic() - start))
        sub = replace(cfg, cut_side=k)
        out = _solve_one(sub, seed, backend, encode_problem(sub), left)
        parts.append((k, out.status, out.seconds))
        # Unknown only happens once the shared budget is spent
        if out.status is not Status.UNSAT:
            break
    out.config, out.parts = cfg, parts
    out.seconds = time.monotonic() - start
    return out


class Outcome(enum.Enum):
    NO_GRAPH = "NoGraph"
    MIN_CONNECTIVITY = "MinConnectivity"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SweepStep:
    drop: int  # 0 is the base feasibility check
    status: Status
    seconds: float


@dataclass
class SweepResult:
    outcome: Outcome
    value: int | None = None  # connectivity for MinConnectivity, failing drop for Inconclusive
    steps: list[SweepStep] = field(default_factory=list)
    witness: Witness | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.outcome is Outcome.MIN_CONNECTIVITY:
            return f"MinConnectivity({self.value})"
        if self.outcome is Outcome.INCONCLUSIVE:
            return f"Inconclusive({self.value})"
        return "NoGraph"

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "value": self.value,
            "reason": self.reason or None,
            "steps": [{"drop": s.drop, "status": s.status.value, "seconds": round(s.seconds, 3)}
                      for s in self.steps],
        }


def min_connectivity(cfg: SearchConfig, max_drop: int | None = None, seed: int = 0,
                     backend: str | None = None, on_step=None) -> SweepResult:
    """Smallest drop count that can disconnect some valid VTS of this shape.

    The base check runs without the drop query; if it is Unsat the answer is
    NoGraph.  Then drop = 1, 2, ... until the first Sat.  An Unknown at any
    step stops the sweep, since it says nothing about later steps.
    """
    cap = cfg.num_nodes ** 2 * cfg.max_parallel
    max_drop = cap if max_drop is None else min(max_drop, cap)
    steps: list[SweepStep] = []

    def probe(c: SearchConfig, drop: int) -> SearchOutcome:
        out = run_search(c, seed=seed, backend=backend)
        steps.append(SweepStep(drop, out.status, out.seconds))
        if on_step:
            on_step(steps[-1])
        return out

    base = probe(replace(cfg, connectivity_query=False, drop=0), 0)
    if base.status is Status.UNKNOWN:
        return SweepResult(Outcome.INCONCLUSIVE, 0, steps, reason="base check timed out")
    if base.status is Status.UNSAT:
        return SweepResult(Outcome.NO_GRAPH, None, steps)
    for drop in range(1, max_drop + 1):
        out = probe(replace(cfg, connectivity_query=True, drop=drop), drop)
        if out.status is Status.SAT:
            return SweepResult(Outcome.MIN_CONNECTIVITY, drop, steps, out.witness)
        if out.status is Status.UNKNOWN:
            return SweepResult(Outcome.INCONCLUSIVE, drop, steps, reason=f"drop {drop} timed out")
    return SweepResult(Outcome.INCONCLUSIVE, None, steps,
                       reason=f"every drop up to {max_drop} is Unsat")
