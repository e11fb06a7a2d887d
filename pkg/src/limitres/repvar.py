"""Points of Hom(G, SL(2,C)): evaluation, membership, Jacobians, local dimension."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import sl2c
from .errors import CertificationError, PreconditionError, RankMismatchError
from .sl2c import I2, adjoint, frob, inv_sl2
from .words import GroupMap, Presentation, Word, fox_derivative

DEFAULT_RANK_TOL = 1e-8
TRUST_GAP = 1e3
# kept singular values below this are indistinguishable from a collapsed point
KEPT_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class Representation:
    """One SL(2,C) matrix per generator of ``presentation``."""

    presentation: Presentation
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = []
        for m in self.matrices:
            m = np.array(m, dtype=complex)
            if m.shape != (2, 2):
                raise ValueError(f"generator image must be 2x2, got {m.shape}")
            if abs(sl2c.det2(m) - 1) > 1e-8 * sl2c.scale(m) ** 2:
                raise ValueError(f"generator image is not unimodular (det = {sl2c.det2(m):.6g})")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "matrices", tuple(mats))
        if len(mats) != self.presentation.rank:
            raise RankMismatchError(
                f"{len(mats)} matrices for a presentation of rank {self.presentation.rank}"
            )

    @cached_property
    def inverses(self) -> tuple[np.ndarray, ...]:
        return tuple(inv_sl2(m) for m in self.matrices)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def __len__(self):
        return len(self.matrices)

    def viewed_on(self, presentation: Presentation) -> Representation:
        """The same matrices regarded as a point of another group's variety."""
        return Representation(presentation, self.matrices)

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation.label,
            "matrices": [sl2c.matrix_to_json(m) for m in self.matrices],
        }

    @classmethod
    def from_json(cls, data: dict, presentation: Presentation) -> Representation:
        return cls(presentation, tuple(sl2c.matrix_from_json(m) for m in data["matrices"]))


def evaluate(rep: Representation, w: Word) -> np.ndarray:
    """Product of generator matrices along ``w``; the identity word gives I."""
    if w.rank != rep.presentation.rank:
        raise RankMismatchError(f"word of rank {w.rank} on a rank {rep.presentation.rank} point")
    out = I2
    mats, invs = rep.matrices, rep.inverses
    for g, s in w.letters:
        out = out @ (mats[g] if s == 1 else invs[g])
    return out


@dataclass
class VarietyReport:
    relator_residual: float
    edge_residual: float
    tol: float
    per_relator: list[float] = field(default_factory=list)

    @property
    def residual(self) -> float:
        return max(self.relator_residual, self.edge_residual)

    @property
    def ok(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict:
        return {
            "relator_residual": self.relator_residual,
            "edge_residual": self.edge_residual,
            "tol": self.tol,
            "ok": self.ok,
        }


def is_on_variety(rep: Representation, tol: float = 1e-8,
                  edge_pairs: Sequence[tuple[Word, Word]] = ()) -> VarietyReport:
    """Relator residuals ``||ev_r - I||_F`` and edge-matching residuals."""
    per = [frob(evaluate(rep, r) - I2) for r in rep.presentation.relators]
    edge = [frob(evaluate(rep, u) - evaluate(rep, v)) for u, v in edge_pairs]
    return VarietyReport(max(per, default=0.0), max(edge, default=0.0), tol, per)


def screen_nondegenerate(rep: Representation, test_words: Iterable[Word],
                         delta: float = sl2c.DEFAULT_DELTA) -> bool:
    """Finite-ball proxy for nondegeneracy.

    Every test word must have trace away from -2 and, if nontrivial, must not
    evaluate to the identity.
    """
    for w in test_words:
        m = evaluate(rep, w)
        if sl2c.trace_defect(m) <= delta:
            return False
        if not w.is_identity() and frob(m - I2) <= delta:
            return False
    return True


def _adjoint_cache(rep: Representation):
    cache: dict[Word, np.ndarray] = {}

    def ad(w):
        if w not in cache:
            cache[w] = adjoint(evaluate(rep, w))
        return cache[w]

    return ad


def _relator_block(r: Word, n: int, ad) -> np.ndarray:
    """The 3 x 3n right-trivialized differential of ev_r."""
    block = np.zeros((3, 3 * n), dtype=complex)
    for i in r.generators_used():
        for c, w in fox_derivative(r, i).terms:
            block[:, 3 * i:3 * i + 3] += c * ad(w)
    return block


def _fox_blocks(rep: Representation) -> list[np.ndarray]:
    ad = _adjoint_cache(rep)
    n = rep.presentation.rank
    return [_relator_block(r, n, ad) for r in rep.presentation.relators]


def relator_jacobian(rep: Representation, tol: float = 1e-8) -> np.ndarray:
    """Differential of ``rho -> (ev_r(rho))_r`` at an on-variety point.

    Tangent vectors are ``(u_1, ..., u_n)`` in sl(2,C)^n acting by
    ``rho(x_i) -> exp(h u_i) rho(x_i)``; each relator contributes three rows
    (coordinates of ``d(ev_r) ev_r^-1`` in the basis H, E, F), assembled from
    the Fox derivatives as ``sum c * Ad(ev_w) u_i``.
    """
    report = is_on_variety(rep, tol)
    if not report.ok:
        raise PreconditionError(
            f"point is off the variety (relator residual {report.relator_residual:.3e} > {tol:.1e})"
        )
    n = rep.presentation.rank
    blocks = _fox_blocks(rep)
    if not blocks:
        return np.zeros((0, 3 * n), dtype=complex)
    return np.vstack(blocks)


@dataclass
class DimensionEstimate:
    point: Representation
    jacobian_rank: int
    local_dim: int
    singular_values: tuple[float, ...]
    rank_gap: float
    exact: bool = False

    @property
    def trusted(self) -> bool:
        if self.rank_gap < TRUST_GAP:
            return False
        return self.jacobian_rank == 0 or self.singular_values[self.jacobian_rank - 1] >= KEPT_FLOOR

    def to_json(self, include_point: bool = False) -> dict:
        out = {
            "jacobian_rank": self.jacobian_rank,
            "local_dim": self.local_dim,
            "singular_values": list(self.singular_values),
            "rank_gap": None if math.isinf(self.rank_gap) else self.rank_gap,
            "trusted": self.trusted,
            "exact": self.exact,
        }
        if include_point:
            out["point"] = self.point.to_json()
        return out


def numeric_rank(sv: np.ndarray, tol: float) -> tuple[int, float]:
    """Rank with threshold ``tol * sigma_max`` and the gap across the cut."""
    if sv.size == 0:
        return 0, math.inf
    smax = float(sv[0])
    if smax <= 1e-14:
        return 0, 0.0
    rank = int(np.sum(sv > tol * smax))
    kept = float(sv[rank - 1])
    dropped = float(sv[rank]) if rank < sv.size else 0.0
    return rank, (kept / dropped if dropped > 0 else math.inf)


def local_dimension(rep: Representation, tol: float = DEFAULT_RANK_TOL,
                    variety_tol: float = 1e-8) -> DimensionEstimate:
    """``3n - rank(J)`` at ``rep``; exactly ``3n`` for a free group."""
    n = rep.presentation.rank
    if rep.presentation.is_free:
        return DimensionEstimate(rep, 0, 3 * n, (), math.inf, exact=True)
    jac = relator_jacobian(rep, variety_tol)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank, gap = numeric_rank(sv, tol)
    return DimensionEstimate(rep, rank, 3 * n - rank, tuple(float(s) for s in sv), gap)


def pullback(f: GroupMap, rep: Representation) -> Representation:
    """Precompose: the point ``x -> rep(f(x))`` of the source group."""
    if rep.presentation.rank != f.target.rank:
        raise RankMismatchError(
            f"point of rank {rep.presentation.rank} pulled back along a map into rank {f.target.rank}"
        )
    return Representation(f.source, tuple(evaluate(rep, w) for w in f.images))


def check_hom_numeric(f: GroupMap, reps: Sequence[Representation]) -> float:
    """Largest ``||rho(f(r)) - I||`` over source relators and target points."""
    worst = 0.0
    for rep in reps:
        for r in f.source.relators:
            worst = max(worst, frob(evaluate(rep, f(r)) - I2))
    return worst


def _newton_system(rep: Representation, relators: Sequence[Word], free: Sequence[int]):
    residual, jac_rows = [], []
    n = rep.presentation.rank
    ad = _adjoint_cache(rep)
    for r in relators:
        m = evaluate(rep, r)
        residual.append((m - I2).ravel())
        block = _relator_block(r, n, ad)
        cols = [(sl2c.from_coords(block[:, 3 * i + b]) @ m).ravel() for i in free for b in range(3)]
        jac_rows.append(np.array(cols).T)
    return np.concatenate(residual), np.vstack(jac_rows)


def _newton(rep: Representation, relators: Sequence[Word], free: Sequence[int], tol: float,
            max_iter: int, max_step: float) -> Representation:
    current = rep
    res, jac = _newton_system(current, relators, free)
    norm = float(np.abs(res).max())
    for _ in range(max_iter):
        if norm <= tol:
            return current
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        t = min(1.0, max_step / max(float(np.linalg.norm(step)), 1e-300))
        for _ in range(30):
            mats = list(current.matrices)
            for k, i in enumerate(free):
                mats[i] = sl2c.exp_mat(t * sl2c.from_coords(step[3 * k:3 * k + 3])) @ mats[i]
            trial = Representation(current.presentation, tuple(mats))
            trial_res, trial_jac = _newton_system(trial, relators, free)
            trial_norm = float(np.abs(trial_res).max())
            if trial_norm < norm:
                break
            t /= 2
        else:
            break
        current, res, jac, norm = trial, trial_res, trial_jac, trial_norm
    if norm <= tol:
        return current
    raise CertificationError(f"Newton projection stalled at residual {norm:.3e}")


def project_to_variety(rep: Representation, tol: float = 1e-13, max_iter: int = 60,
                       max_step: float = 0.5) -> Representation:
    """Gauss-Newton descent onto the relator variety from a nearby start.

    Generators are settled in order: relators whose largest generator index
    is ``k`` are first solved by moving generator ``k`` alone, then the whole
    system is polished.  Steps are minimum-norm solutions in right-trivialized
    coordinates applied as ``rho(x_i) -> exp(u_i) rho(x_i)``, so every iterate
    stays in SL(2,C).
    """
    pres = rep.presentation
    if pres.is_free:
        return rep
    current = rep
    for k in range(pres.rank):
        rels = [r for r in pres.relators if max(r.generators_used()) == k]
        if not rels:
            continue
        try:
            current = _newton(current, rels, [k], tol, max_iter, max_step)
        except CertificationError:
            current = _newton(current, rels, list(range(k + 1)), tol, max_iter, max_step)
    return _newton(current, pres.relators, list(range(pres.rank)), tol, max_iter, max_step)


def sample_on_variety(pres: Presentation, rng: np.random.Generator, tol: float = 1e-13,
                      attempts: int = 20, avoid: float = 1e-4) -> Representation:
    """A point of R(G): free groups are sampled directly, others by projection.

    Projected points with a generator within ``avoid`` of +-I are discarded,
    since the projection can be drawn into that singular stratum.
    """
    for _ in range(attempts):
        start = Representation(pres, tuple(sl2c.sample_sl2(rng) for _ in range(pres.rank)))
        if pres.is_free:
            return start
        try:
            point = project_to_variety(start, tol)
        except CertificationError:
            continue
        if all(min(frob(m - I2), frob(m + I2)) > avoid for m in point.matrices):
            return point
    raise CertificationError(f"could not find a point on the variety of {pres.label}")
