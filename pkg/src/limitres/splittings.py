"""One-edged splittings, elementary Dehn twists and their lifts to free groups."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import repvar
from .errors import CentralizerError, CertificationError, PreconditionError
from .repvar import Representation, evaluate
from .sl2c import frob, scale
from .words import GroupMap, Presentation, Word, apply_map, free_group

AMALGAM = "amalgam"
HNN = "hnn"


@dataclass(frozen=True, eq=False)
class OneEdgedSplitting:
    """``G1 *_E G2`` or ``G' *_E`` over an abelian edge group E.

    Edge words are given in the vertex groups' own generators.  E may be
    trivial (empty edge lists).
    """

    kind: str
    left: Presentation | None = None
    right: Presentation | None = None
    edge_left: tuple[Word, ...] = ()
    edge_right: tuple[Word, ...] = ()
    vertex: Presentation | None = None
    edge: tuple[Word, ...] = ()
    edge_conjugate: tuple[Word, ...] = ()
    stable_letter: str = "t"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for attr in ("edge_left", "edge_right", "edge", "edge_conjugate"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        if self.kind == AMALGAM:
            if self.left is None or self.right is None:
                raise ValueError("an amalgamation needs left and right vertex groups")
            if len(self.edge_left) != len(self.edge_right):
                raise ValueError("edge_left and edge_right must list the same number of words")
            _check_words(self.edge_left, self.left, "edge_left")
            _check_words(self.edge_right, self.right, "edge_right")
            clash = set(self.left.names) & set(self.right.names)
            if clash:
                raise ValueError(f"vertex groups share generator names {sorted(clash)}")
        elif self.kind == HNN:
            if self.vertex is None:
                raise ValueError("an HNN extension needs a vertex group")
            if len(self.edge) != len(self.edge_conjugate):
                raise ValueError("edge and conj must list the same number of words")
            _check_words(self.edge, self.vertex, "edge")
            _check_words(self.edge_conjugate, self.vertex, "conj")
            if self.stable_letter in self.vertex.names:
                raise ValueError(f"stable letter {self.stable_letter!r} clashes with a vertex generator")
        else:
            raise ValueError(f"unknown splitting kind {self.kind!r}")

    @property
    def twist_side(self) -> Presentation:
        """The vertex group that must contain the twisting element."""
        return self.right if self.kind == AMALGAM else self.vertex

    @property
    def side_edge_words(self) -> tuple[Word, ...]:
        """Generators of E written in the twist side."""
        return self.edge_right if self.kind == AMALGAM else self.edge

    @cached_property
    def assembled(self) -> Presentation:
        """The presentation of G realizing the pushout."""
        if self.kind == AMALGAM:
            n1, n = self.left.rank, self.left.rank + self.right.rank
            rels = [r.with_rank(n) for r in self.left.relators]
            rels += [r.shifted(n1, n) for r in self.right.relators]
            for u, v in zip(self.edge_left, self.edge_right):
                r = u.with_rank(n) * ~v.shifted(n1, n)
                if not r.is_identity():
                    rels.append(r)
            return Presentation(self.left.names + self.right.names, tuple(rels),
                                self.name or f"{self.left.label}*{self.right.label}")
        n = self.vertex.rank + 1
        t = Word.generator(n, n - 1)
        rels = [r.with_rank(n) for r in self.vertex.relators]
        for u, v in zip(self.edge, self.edge_conjugate):
            r = t * u.with_rank(n) * ~t * ~v.with_rank(n)
            if not r.is_identity():
                rels.append(r)
        return Presentation(self.vertex.names + (self.stable_letter,), tuple(rels),
                            self.name or f"{self.vertex.label}*_{self.stable_letter}")

    def embed(self, w: Word) -> Word:
        """Embed a word of the twist side into the assembled group."""
        n = self.assembled.rank
        if self.kind == AMALGAM:
            return w.shifted(self.left.rank, n)
        return w.with_rank(n)

    @property
    def stable_index(self) -> int:
        return self.assembled.rank - 1

    def side_partition(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(untouched generators, moved generators) of the assembled group."""
        n = self.assembled.rank
        if self.kind == AMALGAM:
            k = self.left.rank
            return tuple(range(k)), tuple(range(k, n))
        return tuple(range(n - 1)), (n - 1,)

    def edge_pairs(self) -> list[tuple[Word, Word]]:
        """Word pairs in G whose evaluations must agree on R(G)."""
        n = self.assembled.rank
        if self.kind == AMALGAM:
            k = self.left.rank
            return [(u.with_rank(n), v.shifted(k, n)) for u, v in zip(self.edge_left, self.edge_right)]
        t = Word.generator(n, n - 1)
        return [(t * u.with_rank(n) * ~t, v.with_rank(n))
                for u, v in zip(self.edge, self.edge_conjugate)]


def _check_words(words, pres, label):
    for w in words:
        if w.rank != pres.rank:
            raise ValueError(f"{label} word {w!r} is not written in {pres.label}")


def amalgam(left: Presentation, right: Presentation, edge_left: Sequence[Word],
            edge_right: Sequence[Word], name: str = "") -> OneEdgedSplitting:
    return OneEdgedSplitting(AMALGAM, left=left, right=right, edge_left=tuple(edge_left),
                             edge_right=tuple(edge_right), name=name)


def hnn(vertex: Presentation, edge: Sequence[Word], edge_conjugate: Sequence[Word],
        stable_letter: str = "t", name: str = "") -> OneEdgedSplitting:
    return OneEdgedSplitting(HNN, vertex=vertex, edge=tuple(edge),
                             edge_conjugate=tuple(edge_conjugate), stable_letter=stable_letter,
                             name=name)


def _commutes(a, b) -> float:
    return frob(a @ b - b @ a) / (scale(a) * scale(b))


def certify_centralizer(s: OneEdgedSplitting, e: Word, *, samples: int = 10, tol: float = 1e-6,
                        rng: np.random.Generator | None = None) -> float:
    """Check E abelian and ``e`` in its centralizer on sampled points of the twist side.

    Returns the worst relative commutator norm; raises if it exceeds ``tol``.
    """
    side = s.twist_side
    if e.rank != side.rank:
        raise ValueError(f"twisting element must be a word in {side.label}")
    rng = rng if rng is not None else np.random.default_rng(0)
    edges = s.side_edge_words
    worst_edge = worst = 0.0
    for _ in range(samples):
        rho = repvar.sample_on_variety(side, rng)
        mats = [evaluate(rho, g) for g in edges]
        m_e = evaluate(rho, e)
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                worst_edge = max(worst_edge, _commutes(mats[i], mats[j]))
            worst = max(worst, _commutes(m_e, mats[i]))
    if worst_edge > 1e-8:
        raise CertificationError(f"edge group is not abelian on sampled points ({worst_edge:.3e})")
    if worst > tol:
        raise CentralizerError(
            f"twisting element does not centralize the edge group (commutator {worst:.3e} > {tol:.1e})"
        )
    return max(worst, worst_edge)


def _twist_images(s: OneEdgedSplitting, e_in_g: Word) -> tuple[Word, ...]:
    g = s.assembled
    fixed, moved = s.side_partition()
    images = list(g.gens())
    for i in moved:
        x = Word.generator(g.rank, i)
        images[i] = x * e_in_g if s.kind == HNN else e_in_g * x * ~e_in_g
    return tuple(images)


def elementary_twist(s: OneEdgedSplitting, e: Word, *, certify: bool = True, samples: int = 10,
                     tol: float = 1e-6, rng: np.random.Generator | None = None) -> GroupMap:
    """The Dehn twist in ``e``: identity on G1 (or G'), conjugation by ``e``
    on G2 (or ``t -> t e``)."""
    if certify:
        certify_centralizer(s, e, samples=samples, tol=tol, rng=rng)
    g = s.assembled
    return GroupMap(g, g, _twist_images(s, s.embed(e)))


@dataclass(frozen=True, eq=False)
class LiftData:
    splitting: OneEdgedSplitting
    lifted_group: Presentation
    projection: GroupMap
    edge_element: Word
    lifted_edge_element: Word
    base_twist: GroupMap
    lifted_twist: GroupMap


def lift(s: OneEdgedSplitting, e: Word, **kwargs) -> LiftData:
    """Free cover of G with projection onto G and the lifted twist.

    The free factors carry exactly the vertex groups' generators, so the
    projection is the identity on generator names and the lifted element is
    the same letter string as ``e``.
    """
    base = elementary_twist(s, e, **kwargs)
    g = s.assembled
    lifted = free_group(g.rank, g.names, name=f"~{g.label}")
    projection = GroupMap(lifted, g, tuple(g.gens()))
    e_tilde = s.embed(e)
    lifted_twist = GroupMap(lifted, lifted, _twist_images(s, e_tilde))
    return LiftData(s, lifted, projection, s.embed(e), e_tilde, base, lifted_twist)


@dataclass
class DiagramReport:
    max_residual: float
    per_generator: list[float]
    tol: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "per_generator": self.per_generator,
            "tol": self.tol,
            "samples": self.samples,
            "passed": self.passed,
        }


def check_diagram(l: LiftData, reps: Sequence[Representation], tol: float = 1e-8) -> DiagramReport:
    """Compare ``rho(pi(lifted_twist(x)))`` with ``rho(twist(pi(x)))`` per generator."""
    g = l.projection.target
    lhs_words, rhs_words = [], []
    for x in l.lifted_group.gens():
        lhs_words.append(apply_map(l.projection, apply_map(l.lifted_twist, x)))
        rhs_words.append(apply_map(l.base_twist, apply_map(l.projection, x)))
    per = [0.0] * len(lhs_words)
    for rho in reps:
        rep_check = repvar.is_on_variety(rho, tol)
        if rho.presentation.rank != g.rank or not rep_check.ok:
            raise PreconditionError(
                f"sample is not a point of R({g.label}) (residual {rep_check.residual:.3e})"
            )
        for k, (u, v) in enumerate(zip(lhs_words, rhs_words)):
            per[k] = max(per[k], frob(evaluate(rho, u) - evaluate(rho, v)))
    return DiagramReport(max(per, default=0.0), per, tol, len(reps))
