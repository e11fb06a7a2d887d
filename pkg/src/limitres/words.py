"""Free group words, finite presentations, homomorphisms and Fox calculus.

A letter is a pair ``(generator_index, sign)`` with ``sign`` in ``{1, -1}``.
Words are always kept freely reduced, so two words are equal as group
elements of the free group exactly when they compare equal.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import MalformedWordError, RankMismatchError

Letter = tuple[int, int]


def _free_reduce(letters: Iterable[Letter], rank: int) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for letter in letters:
        try:
            gen, sign = letter
        except (TypeError, ValueError):
            raise MalformedWordError(f"not a letter: {letter!r}") from None
        if sign not in (1, -1):
            raise MalformedWordError(f"exponent sign must be +1 or -1, got {sign!r}")
        if not 0 <= gen < rank:
            raise MalformedWordError(f"generator index {gen} out of range for rank {rank}")
        if stack and stack[-1][0] == gen and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((int(gen), int(sign)))
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group of the given rank."""

    rank: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise MalformedWordError("rank must be nonnegative")
        object.__setattr__(self, "letters", _free_reduce(self.letters, self.rank))

    @classmethod
    def identity(cls, rank: int) -> Word:
        return cls(rank, ())

    @classmethod
    def generator(cls, rank: int, index: int, sign: int = 1) -> Word:
        return cls(rank, ((index, sign),))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def __mul__(self, other: Word) -> Word:
        return multiply(self, other)

    def __invert__(self) -> Word:
        return invert(self)

    def __pow__(self, n: int) -> Word:
        if n < 0:
            return invert(self) ** (-n)
        return Word(self.rank, self.letters * n)

    def with_rank(self, rank: int) -> Word:
        """Reinterpret the same letters in a free group of larger (or equal) rank."""
        return Word(rank, self.letters)

    def shifted(self, offset: int, rank: int) -> Word:
        return Word(rank, tuple((g + offset, s) for g, s in self.letters))

    def generators_used(self) -> set[int]:
        return {g for g, _ in self.letters}

    def __repr__(self):
        return f"Word({self.rank}, {format_word(self)!r})"


def reduce(letters: Iterable[Letter], rank: int) -> Word:
    """Freely reduce a raw letter sequence."""
    return Word(rank, tuple(letters))


def _check_rank(a: Word, b: Word):
    if a.rank != b.rank:
        raise RankMismatchError(f"words live in free groups of rank {a.rank} and {b.rank}")


def multiply(a: Word, b: Word) -> Word:
    _check_rank(a, b)
    return Word(a.rank, a.letters + b.letters)


def invert(a: Word) -> Word:
    return Word(a.rank, tuple((g, -s) for g, s in reversed(a.letters)))


def commutator(a: Word, b: Word) -> Word:
    """``a b a^-1 b^-1``."""
    return a * b * ~a * ~b


def conjugate(w: Word, by: Word) -> Word:
    """``by w by^-1``."""
    return by * w * ~by


def format_word(w: Word, names: Sequence[str] | None = None) -> str:
    """Render ``w`` with ``^`` powers and ``*`` separators; identity is ``1``."""
    if not w.letters:
        return "1"
    if names is None:
        names = default_names(w.rank)
    parts = []
    for (gen, sign), run in itertools.groupby(w.letters):
        power = sign * len(list(run))
        parts.append(names[gen] if power == 1 else f"{names[gen]}^{power}")
    return "*".join(parts)


def default_names(rank: int) -> list[str]:
    if rank <= 26:
        return [chr(ord("a") + i) for i in range(rank)]
    return [f"x{i}" for i in range(rank)]


def word_ball(rank: int, radius: int) -> list[Word]:
    """All nonempty reduced words of length at most ``radius``, shortlex ordered."""
    out: list[Word] = []
    frontier: list[tuple[Letter, ...]] = [()]
    letters = [(g, s) for g in range(rank) for s in (1, -1)]
    for _ in range(radius):
        nxt = []
        for prefix in frontier:
            for g, s in letters:
                if prefix and prefix[-1] == (g, -s):
                    continue
                nxt.append(prefix + ((g, s),))
        out.extend(Word(rank, w) for w in nxt)
        frontier = nxt
    return out


@dataclass(frozen=True)
class Presentation:
    """Generators and relators of a finitely presented group.

    Equality is structural (rank and relators); names are cosmetic.
    """

    names: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        for r in self.relators:
            if r.rank != self.rank:
                raise RankMismatchError(
                    f"relator {r!r} has rank {r.rank}, presentation has rank {self.rank}"
                )
            if r.is_identity():
                raise MalformedWordError("relators must be nonempty reduced words")

    # names are excluded from eq, so hash must agree with eq
    def __hash__(self):
        return hash((len(self.names), self.relators))

    def __eq__(self, other):
        if not isinstance(other, Presentation):
            return NotImplemented
        return self.rank == other.rank and self.relators == other.relators

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def is_free(self) -> bool:
        return not self.relators

    def gen(self, name_or_index: str | int, sign: int = 1) -> Word:
        index = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return Word.generator(self.rank, index, sign)

    def gens(self) -> list[Word]:
        return [Word.generator(self.rank, i) for i in range(self.rank)]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no generator named {name!r} in {self.label}") from None

    def identity(self) -> Word:
        return Word.identity(self.rank)

    def word(self, text: str) -> Word:
        """Parse ``text`` in this presentation's generator names."""
        from .textformat import parse_word

        return parse_word(text, self.names)

    def format(self, w: Word) -> str:
        return format_word(w, self.names)

    @property
    def label(self) -> str:
        return self.name or f"<{', '.join(self.names)}>"

    def __repr__(self):
        rels = "; ".join(self.format(r) for r in self.relators)
        return f"Presentation({self.label}: gens={' '.join(self.names)} rels={rels})"


def free_group(rank: int, names: Sequence[str] | None = None, name: str = "") -> Presentation:
    names = tuple(names) if names is not None else tuple(default_names(rank))
    if len(names) != rank:
        raise ValueError("number of names must equal the rank")
    return Presentation(names, (), name or f"F{rank}")


def free_abelian_group(rank: int, names: Sequence[str] | None = None, name: str = "") -> Presentation:
    """``Z^rank`` with all pairwise commutators as relators."""
    names = tuple(names) if names is not None else tuple(default_names(rank))
    gens = [Word.generator(rank, i) for i in range(rank)]
    rels = tuple(commutator(gens[i], gens[j]) for i, j in itertools.combinations(range(rank), 2))
    return Presentation(names, rels, name or f"Z{rank}")


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism given by the images of the source generators."""

    source: Presentation
    target: Presentation
    images: tuple[Word, ...]
    verified_relators: bool = False

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.source.rank:
            raise RankMismatchError(
                f"{len(self.images)} images given for a source of rank {self.source.rank}"
            )
        for w in self.images:
            if w.rank != self.target.rank:
                raise RankMismatchError("image words must be written in the target generators")

    def __call__(self, w: Word) -> Word:
        return apply_map(self, w)

    def describe(self) -> dict[str, str]:
        return {
            self.source.names[i]: self.target.format(img) for i, img in enumerate(self.images)
        }


def identity_map(p: Presentation) -> GroupMap:
    return GroupMap(p, p, tuple(p.gens()), verified_relators=True)


def apply_map(f: GroupMap, w: Word) -> Word:
    """Substitute generator images into ``w`` and freely reduce."""
    if w.rank != f.source.rank:
        raise RankMismatchError(f"word of rank {w.rank} fed to a map from rank {f.source.rank}")
    out: list[Letter] = []
    for g, s in w.letters:
        img = f.images[g].letters
        out.extend(img if s == 1 else tuple((h, -t) for h, t in reversed(img)))
    return Word(f.target.rank, tuple(out))


def compose(f: GroupMap, g: GroupMap) -> GroupMap:
    """``f o g``: first ``g``, then ``f``."""
    if g.target != f.source or g.target.names != f.source.names:
        raise RankMismatchError(
            f"cannot compose: target {g.target.label} does not match source {f.source.label}"
        )
    return GroupMap(
        g.source,
        f.target,
        tuple(apply_map(f, w) for w in g.images),
        verified_relators=f.verified_relators and g.verified_relators,
    )


@dataclass(frozen=True)
class GroupRingElement:
    """Integer combination of free group words, normalized by word."""

    terms: tuple[tuple[int, Word], ...] = ()

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[int, Word]]) -> GroupRingElement:
        acc: dict[Word, int] = defaultdict(int)
        for c, w in pairs:
            acc[w] += c
        terms = sorted(((c, w) for w, c in acc.items() if c), key=lambda t: _word_key(t[1]))
        return cls(tuple(terms))

    @classmethod
    def one(cls, rank: int) -> GroupRingElement:
        return cls(((1, Word.identity(rank)),))

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        return GroupRingElement.from_terms(self.terms + other.terms)

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(tuple((-c, w) for c, w in self.terms))

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return self + (-other)

    def left_multiply(self, u: Word) -> GroupRingElement:
        return GroupRingElement.from_terms((c, u * w) for c, w in self.terms)

    def augmentation(self) -> int:
        return sum(c for c, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*({format_word(w)})" for c, w in self.terms)


def _word_key(w: Word):
    return (len(w.letters), w.letters)


@lru_cache(maxsize=4096)
def fox_derivative(w: Word, i: int) -> GroupRingElement:
    """Fox derivative of ``w`` with respect to generator ``i``.

    A positive letter ``x_i`` with prefix ``p`` contributes ``+p``; an
    inverse letter contributes ``-p x_i^-1``.
    """
    if not 0 <= i < w.rank:
        raise MalformedWordError(f"generator index {i} out of range for rank {w.rank}")
    terms = []
    prefix: list[Letter] = []
    for g, s in w.letters:
        if s == 1:
            if g == i:
                terms.append((1, tuple(prefix)))
            prefix.append((g, 1))
        else:
            prefix.append((g, -1))
            if g == i:
                terms.append((-1, tuple(prefix)))
    return GroupRingElement.from_terms((c, Word(w.rank, p)) for c, p in terms)


def abelianization(w: Word) -> tuple[int, ...]:
    """Exponent sum of each generator."""
    counts = [0] * w.rank
    for g, s in w.letters:
        counts[g] += s
    return tuple(counts)


def spans_integer_lattice(vectors: Sequence[Sequence[int]], dim: int) -> bool:
    """Whether the integer vectors generate all of Z^dim (column Euclid reduction)."""
    cols = [list(v) for v in vectors if any(v)]
    for row in range(dim):
        pivots = [c for c in cols if c[row] != 0]
        rest = [c for c in cols if c[row] == 0]
        while len(pivots) > 1:
            pivots.sort(key=lambda c: abs(c[row]))
            p = pivots[0]
            nxt = [p]
            for c in pivots[1:]:
                q = c[row] // p[row]
                c = [x - q * y for x, y in zip(c, p)]
                (nxt if c[row] != 0 else rest).append(c)
            pivots = nxt
        if not pivots or abs(pivots[0][row]) != 1:
            return False
        cols = [c for c in rest if any(c)]
    return True


def abelian_surjective(f: GroupMap) -> bool:
    """Whether ``f`` induces a surjection on abelianizations.

    Necessary for ``f`` to be onto; exact over the integers.
    """
    vecs = [abelianization(w) for w in f.images]
    vecs += [abelianization(r) for r in f.target.relators]
    return spans_integer_lattice(vecs, f.target.rank)
