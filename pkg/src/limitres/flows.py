"""Holomorphic one-parameter twist families on representation varieties.

For a base point ``eta`` and a twisting element ``e`` with
``M(z) = exp(z log eta(e))``, the family moves the twisted side of a splitting:
conjugation ``y -> M(z) eta(y) M(z)^-1`` for an amalgamation, and
``t -> eta(t) M(z)`` for an HNN extension.  At ``z = 0`` it is ``eta``; at
``z = 1`` it is the pullback of ``eta`` along the Dehn twist.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import repvar, sl2c
from .errors import DomainError, PreconditionError, RankMismatchError
from .repvar import Representation, evaluate
from .sl2c import DEFAULT_DELTA, StandardNeighborhood, frob
from .splittings import AMALGAM, HNN, LiftData
from .words import Presentation, Word


@dataclass(frozen=True, eq=False)
class TwistFamily:
    presentation: Presentation
    base: Representation
    neighborhood: StandardNeighborhood
    kind: str
    fixed: tuple[int, ...]
    moved: tuple[int, ...]
    edge_element: Word
    edge_pairs: tuple[tuple[Word, Word], ...] = ()
    centralized: tuple[Word, ...] = ()
    lift: LiftData | None = field(default=None, repr=False)

    @property
    def epsilon(self) -> float:
        return self.neighborhood.epsilon


def _build(presentation, base, kind, fixed, moved, e, edge_pairs, centralized, lift,
           epsilon, delta, rng, variety_tol):
    report = repvar.is_on_variety(base, variety_tol, edge_pairs)
    if not report.ok:
        raise PreconditionError(
            f"base point is off the variety (residual {report.residual:.3e} > {variety_tol:.1e})"
        )
    # DegenerateElementError propagates when eta(e) has trace -2
    nb = sl2c.standard_neighborhood(evaluate(base, e), epsilon, delta=delta, rng=rng)
    return TwistFamily(presentation, base, nb, kind, tuple(fixed), tuple(moved), e,
                       tuple(edge_pairs), tuple(centralized), lift)


def make_family(lift: LiftData, base: Representation, *, epsilon: float = 0.1,
                delta: float = DEFAULT_DELTA, rng: np.random.Generator | None = None,
                variety_tol: float = 1e-8) -> TwistFamily:
    """The family through ``base`` (a point of R(G)) for the lifted twist."""
    s = lift.splitting
    g = s.assembled
    if base.presentation.rank != g.rank:
        raise RankMismatchError("base point does not match the splitting's group")
    fixed, moved = s.side_partition()
    centralized = tuple(s.embed(w) for w in s.side_edge_words)
    return _build(g, base, s.kind, fixed, moved, lift.edge_element, s.edge_pairs(), centralized,
                  lift, epsilon, delta, rng, variety_tol)


def stage_family(presentation: Presentation, base: Representation, kind: str,
                 moved: Sequence[int], element: Word, *, epsilon: float = 0.1,
                 delta: float = DEFAULT_DELTA, rng: np.random.Generator | None = None,
                 variety_tol: float = 1e-8) -> TwistFamily:
    """A family given directly by its moved generators and twisting element."""
    if kind not in (AMALGAM, HNN):
        raise ValueError(f"unknown twist kind {kind!r}")
    if kind == HNN and len(moved) != 1:
        raise ValueError("an HNN twist moves exactly one stable letter")
    fixed = tuple(i for i in range(presentation.rank) if i not in set(moved))
    return _build(presentation, base, kind, fixed, moved, element, (), (), None,
                  epsilon, delta, rng, variety_tol)


def twist_matrices(base: Representation, kind: str, moved: Sequence[int],
                   m: np.ndarray, m_inv: np.ndarray) -> tuple[np.ndarray, ...]:
    mats = list(base.matrices)
    for i in moved:
        mats[i] = mats[i] @ m if kind == HNN else m @ mats[i] @ m_inv
    return tuple(mats)


def eval_family(fam: TwistFamily, z: complex) -> Representation:
    """The twisted point at parameter ``z`` in the path domain."""
    z = complex(z)
    if not fam.neighborhood.contains(z):
        raise DomainError(f"z = {z} lies outside the path domain (epsilon = {fam.epsilon:g})")
    v = fam.neighborhood.log_base
    m = sl2c.exp_mat(z * v)
    m_inv = sl2c.exp_mat(-z * v)
    return Representation(fam.base.presentation,
                          twist_matrices(fam.base, fam.kind, fam.moved, m, m_inv))


@dataclass
class FlowRow:
    z: complex
    relator_residual: float
    edge_residual: float
    unimodularity_residual: float
    centralizer_residual: float

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "relator_residual": self.relator_residual,
            "edge_residual": self.edge_residual,
            "unimodularity_residual": self.unimodularity_residual,
            "centralizer_residual": self.centralizer_residual,
        }


@dataclass
class FlowReport:
    rows: list[FlowRow]
    tol: float
    base_residual: float

    def _max(self, attr) -> float:
        return max((getattr(r, attr) for r in self.rows), default=0.0)

    @property
    def max_relator_residual(self) -> float:
        return self._max("relator_residual")

    @property
    def max_edge_residual(self) -> float:
        return self._max("edge_residual")

    @property
    def max_unimodularity_residual(self) -> float:
        return self._max("unimodularity_residual")

    @property
    def max_centralizer_residual(self) -> float:
        return self._max("centralizer_residual")

    @property
    def max_residual(self) -> float:
        return max(self.max_relator_residual, self.max_edge_residual)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol and self.max_unimodularity_residual <= self.tol

    def summary(self) -> dict:
        return {
            "samples": len(self.rows),
            "base_residual": self.base_residual,
            "max_relator_residual": self.max_relator_residual,
            "max_edge_residual": self.max_edge_residual,
            "max_unimodularity_residual": self.max_unimodularity_residual,
            "max_centralizer_residual": self.max_centralizer_residual,
            "tol": self.tol,
            "passed": self.passed,
        }

    def to_json(self, rows: bool = True) -> dict:
        out = {"summary": self.summary()}
        if rows:
            out["rows"] = [r.to_json() for r in self.rows]
        return out


def path_samples(epsilon: float, grid: int = 64, jitter: int = 36,
                 rng: np.random.Generator | None = None) -> list[complex]:
    """Equispaced points of [0, 1] plus complex points within epsilon/2 of it."""
    rng = rng if rng is not None else np.random.default_rng(0)
    pts = [complex(x) for x in np.linspace(0.0, 1.0, grid)]
    if jitter:
        pts += [complex(z) for z in sl2c.sample_path_domain(rng, epsilon / 2, jitter)]
    return pts


def verify_flow(fam: TwistFamily, presentation: Presentation | None = None, *,
                grid: int = 64, jitter: int = 36, tol: float = 1e-9,
                rng: np.random.Generator | None = None) -> FlowReport:
    """Sample the path domain and record membership residuals along the family."""
    pres = presentation if presentation is not None else fam.presentation
    if pres.rank != fam.presentation.rank:
        raise RankMismatchError("presentation does not match the family's group")
    base_res = repvar.is_on_variety(fam.base.viewed_on(pres), tol, fam.edge_pairs).residual
    central = [evaluate(fam.base, w) for w in fam.centralized]
    rows = []
    for z in path_samples(fam.epsilon, grid, jitter, rng):
        rho = eval_family(fam, z).viewed_on(pres)
        var = repvar.is_on_variety(rho, tol, fam.edge_pairs)
        m = fam.neighborhood.one_parameter(z)
        m_inv = sl2c.inv_sl2(m)
        cres = max((frob(m @ c @ m_inv - c) for c in central), default=0.0)
        unimod = max((float(abs(sl2c.det2(x) - 1)) for x in rho.matrices), default=0.0)
        rows.append(FlowRow(z, var.relator_residual, var.edge_residual, unimod, cres))
    return FlowReport(rows, tol, base_res)


def endpoint_residuals(fam: TwistFamily) -> tuple[float, float]:
    """Distances of the family at 0 and 1 from the base and the twisted pullback."""
    at0 = eval_family(fam, 0.0)
    r0 = max((frob(a - b) for a, b in zip(at0.matrices, fam.base.matrices)), default=0.0)
    if fam.lift is None:
        return r0, float("nan")
    twisted = repvar.pullback(fam.lift.base_twist, fam.base)
    at1 = eval_family(fam, 1.0)
    r1 = max((frob(a - b) for a, b in zip(at1.matrices, twisted.matrices)), default=0.0)
    return r0, r1


def cauchy_riemann_residual(fam: TwistFamily, z: complex, h: float = 1e-6) -> float:
    """``|d/d(conj z)|`` of the family's matrix entries by central differences."""
    def entries(w):
        return np.concatenate([m.ravel() for m in eval_family(fam, w).matrices])

    dx = (entries(z + h) - entries(z - h)) / (2 * h)
    dy = (entries(z + 1j * h) - entries(z - 1j * h)) / (2 * h)
    return float(np.abs(0.5 * (dx + 1j * dy)).max(initial=0.0))


__all__ = [
    "TwistFamily",
    "make_family",
    "stage_family",
    "eval_family",
    "verify_flow",
    "FlowReport",
    "FlowRow",
    "path_samples",
    "endpoint_residuals",
    "cauchy_riemann_residual",
    "twist_matrices",
]
