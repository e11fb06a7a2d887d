"""Resolution descriptors: certification of each epimorphism and the
dimension sequence at pulled-back generic points.

A descriptor lists groups ``L_1 ->> L_2 ->> ... ->> L_k`` ending at a free
group of rank ``m``.  Each map carries a kernel witness: a word of the source
that the map kills but that survives on some sampled point of the source.
The harness samples the free terminus, pulls the points back through the
composed maps, optionally moves them along stage twist families, and records
the largest trusted local dimension at each stage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import flows, repvar, sl2c
from .catalog import catalog_groups
from .errors import CertificationError, DegenerateElementError, ParseError
from .folding import generates_free_group
from .repvar import Representation, evaluate
from .sl2c import I2, frob
from .splittings import AMALGAM, HNN
from .textformat import parse_word, parse_word_list
from .words import (GroupMap, Presentation, Word, abelian_surjective, compose,
                    free_group, identity_map, word_ball)

SCHEMA_VERSION = 1
ASSUMPTIONS = (
    "strictness of every map is assumed, not certified; only properness and the "
    "dimension drop are checked",
    "irreducibility of the analytic sets swept by twist families is assumed",
    "dimensions are local Jacobian-kernel dimensions at sampled points, not "
    "dimensions of irreducible components",
    "nondegeneracy is screened on a finite ball of words only",
)
KILL_TOL = 1e-8
SURVIVE_TOL = 1e-6

# rng stream tags, so every purpose draws from its own reproducible stream
_TARGET, _SOURCE, _TERMINUS, _TWIST = 1, 2, 3, 4


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


@dataclass(frozen=True)
class StageTwist:
    kind: str
    moved: tuple[int, ...]
    element: Word

    def to_json(self, pres: Presentation) -> dict:
        return {"kind": self.kind, "moved": [pres.names[i] for i in self.moved],
                "element": pres.format(self.element)}


@dataclass(frozen=True, eq=False)
class ResolutionDescriptor:
    stages: tuple[Presentation, ...]
    maps: tuple[GroupMap, ...]
    witnesses: tuple[Word, ...]
    terminal_rank: int
    terminal_iso: GroupMap | None = None
    twists: tuple[tuple[StageTwist, ...], ...] = ()
    name: str = ""

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a resolution needs at least one stage")
        if len(self.maps) != len(self.stages) - 1:
            raise ValueError(f"{len(self.stages)} stages need {len(self.stages) - 1} maps")
        for i, f in enumerate(self.maps):
            if f.source != self.stages[i] or f.target != self.stages[i + 1]:
                raise ValueError(f"map {i} does not run from stage {i} to stage {i + 1}")
        if not self.twists:
            object.__setattr__(self, "twists", tuple(() for _ in self.stages))
        if len(self.twists) != len(self.stages):
            raise ValueError("twists must list one entry per stage")

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def terminus(self) -> Presentation:
        return self.stages[-1]


# -- loading ------------------------------------------------------------------

def _require(data: dict, key: str, where: str):
    if key not in data:
        raise ParseError(f"{where}: missing {key!r}")
    return data[key]


def _stage_from_json(entry: Any, groups: dict[str, Presentation], i: int) -> Presentation:
    if isinstance(entry, str):
        if entry not in groups:
            raise ParseError(f"stage {i}: unknown group {entry!r}")
        return groups[entry]
    if isinstance(entry, dict):
        gens = _require(entry, "gens", f"stage {i}")
        if isinstance(gens, str):
            gens = gens.split()
        rels = entry.get("rels", [])
        if isinstance(rels, str):
            rels = [rels]
        words = []
        for r in rels:
            words += parse_word_list(r, gens, sep=";")
        try:
            return Presentation(tuple(gens), tuple(words), entry.get("name", f"L{i + 1}"))
        except ValueError as exc:
            raise ParseError(f"stage {i}: {exc}") from None
    raise ParseError(f"stage {i}: expected a group name or an inline presentation")


def _map_from_json(entry: Any, source: Presentation, target: Presentation, where: str) -> GroupMap:
    images = entry.get("images") if isinstance(entry, dict) else entry
    if not isinstance(images, list) or len(images) != source.rank:
        raise ParseError(f"{where}: expected {source.rank} generator images")
    try:
        words = tuple(parse_word(str(t), target.names) for t in images)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from None
    return GroupMap(source, target, words)


def _twists_from_json(entry: Any, pres: Presentation, i: int) -> tuple[StageTwist, ...]:
    if entry is None:
        return ()
    if isinstance(entry, dict):
        entry = [entry]
    out = []
    for t in entry:
        kind = _require(t, "kind", f"twist at stage {i}")
        if kind not in (AMALGAM, HNN):
            raise ParseError(f"twist at stage {i}: unknown kind {kind!r}")
        moved = t.get("moved", [t["letter"]] if "letter" in t else None)
        if not moved:
            raise ParseError(f"twist at stage {i}: needs moved generators (or letter)")
        if isinstance(moved, str):
            moved = moved.split()
        try:
            idx = tuple(pres.index(m) for m in moved)
        except (KeyError, ValueError):
            raise ParseError(f"twist at stage {i}: unknown generator in {moved}") from None
        if kind == HNN and len(idx) != 1:
            raise ParseError(f"twist at stage {i}: an HNN twist moves one stable letter")
        element = parse_word(str(_require(t, "element", f"twist at stage {i}")), pres.names)
        out.append(StageTwist(kind, idx, element))
    return tuple(out)


def descriptor_from_json(data: dict) -> ResolutionDescriptor:
    if not isinstance(data, dict):
        raise ParseError("a resolution document is a JSON object")
    groups = dict(catalog_groups())
    stages = tuple(_stage_from_json(s, groups, i)
                   for i, s in enumerate(_require(data, "stages", "resolution")))
    if not stages:
        raise ParseError("resolution: no stages")
    raw_maps = data.get("maps", [])
    if len(raw_maps) != len(stages) - 1:
        raise ParseError(f"resolution: {len(stages)} stages need {len(stages) - 1} maps")
    maps = tuple(_map_from_json(m, stages[i], stages[i + 1], f"map {i}")
                 for i, m in enumerate(raw_maps))
    witnesses = []
    for i, w in enumerate(data.get("witnesses", [])):
        if i >= len(stages) - 1:
            raise ParseError("resolution: more witnesses than maps")
        if w is None:
            raise ParseError(f"witness {i}: null witness")
        witnesses.append(parse_word(str(w), stages[i].names))
    m = _require(data, "terminal_rank", "resolution")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise ParseError("resolution: terminal_rank must be a non-negative integer")
    iso = None
    if data.get("terminal_iso") is not None:
        free = free_group(m, name=f"F{m}")
        iso = _map_from_json(data["terminal_iso"], stages[-1], free, "terminal_iso")
    raw_twists = data.get("twists")
    if raw_twists is None:
        twists = tuple(() for _ in stages)
    else:
        if len(raw_twists) != len(stages):
            raise ParseError("resolution: twists must list one entry per stage")
        twists = tuple(_twists_from_json(t, stages[i], i) for i, t in enumerate(raw_twists))
    return ResolutionDescriptor(stages, maps, tuple(witnesses), m, iso, twists,
                                str(data.get("name", "")))


def load_resolution(path: str | Path) -> ResolutionDescriptor:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return descriptor_from_json(data)


# -- certification ------------------------------------------------------------

def _terminal_map(d: ResolutionDescriptor) -> GroupMap | None:
    """A map from the last stage onto F_m, when one is available."""
    last = d.terminus
    if d.terminal_iso is not None:
        return d.terminal_iso
    if last.is_free and last.rank == d.terminal_rank:
        return identity_map(last)
    return None


def _composites(d: ResolutionDescriptor) -> list[GroupMap]:
    """``f_{k-1} o ... o f_i`` from every stage to the last (identity for the last)."""
    out = [identity_map(d.terminus)]
    for f in reversed(d.maps):
        out.append(compose(out[-1], f))
    return out[::-1]


def _target_points(pres: Presentation, seed: int, tag: int, count: int) -> list[Representation]:
    rng = _rng(seed, tag)
    return [repvar.sample_on_variety(pres, rng) for _ in range(count)]


def _finite(x: float) -> float | None:
    return None if math.isinf(x) else x


@dataclass
class MapCertificate:
    index: int
    source: str
    target: str
    homomorphism: bool
    relators_exact: bool
    relator_residual: float
    abelian_surjective: bool
    witness: str | None
    witness_killed: bool
    witness_exact: bool
    witness_target_residual: float
    witness_source_max: float
    status: str

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "source": self.source,
            "target": self.target,
            "homomorphism": self.homomorphism,
            "relators_exact": self.relators_exact,
            "relator_residual": self.relator_residual,
            "abelian_surjective": self.abelian_surjective,
            "witness": self.witness,
            "witness_killed": self.witness_killed,
            "witness_exact": self.witness_exact,
            "witness_target_residual": _finite(self.witness_target_residual),
            "witness_source_max": self.witness_source_max,
            "status": self.status,
        }


@dataclass
class CertificationReport:
    maps: list[MapCertificate]
    surjective_onto_terminus: list[bool]
    terminal_free: bool
    terminal_detail: str
    samples: int

    @property
    def certified(self) -> bool:
        # without a free terminus, surjectivity rests on the per-map abelian check alone
        onto = all(self.surjective_onto_terminus) if self.terminal_free else True
        return all(m.certified for m in self.maps) and onto

    def to_json(self) -> dict:
        return {
            "maps": [m.to_json() for m in self.maps],
            "surjective_onto_terminus": list(self.surjective_onto_terminus),
            "terminal_free": self.terminal_free,
            "terminal_detail": self.terminal_detail,
            "samples": self.samples,
            "certified": self.certified,
        }


def _certify_terminal(d: ResolutionDescriptor) -> tuple[bool, str]:
    last = d.terminus
    if d.terminal_iso is None:
        if last.is_free and last.rank == d.terminal_rank:
            return True, f"{last.label} has no relators and rank {d.terminal_rank}"
        return False, f"no isomorphism onto F{d.terminal_rank} supplied for {last.label}"
    iso = d.terminal_iso
    if last.rank != d.terminal_rank:
        return False, "terminal_iso needs the last stage to have rank equal to terminal_rank"
    if not all(iso(r).is_identity() for r in last.relators):
        return False, "terminal_iso does not kill the relators of the last stage"
    if not generates_free_group(list(iso.images), d.terminal_rank):
        return False, "terminal_iso is not onto the free group"
    # an epimorphism from an m-generated group onto F_m is an isomorphism (F_m is Hopfian)
    return True, "terminal_iso is an epimorphism onto F_m from an m-generated group"


def certify_resolution(d: ResolutionDescriptor, seed: int = 0, samples: int = 20,
                       tol: float = KILL_TOL) -> CertificationReport:
    """Check every map is a proper epimorphism as far as finite data allow."""
    certs = []
    for i, f in enumerate(d.maps):
        src, tgt = f.source, f.target
        images = [f(r) for r in src.relators]
        relators_exact = all(w.is_identity() for w in images)
        targets = _target_points(tgt, seed, (_TARGET << 8) + i, samples) if samples else []
        rel_res = 0.0
        if not relators_exact:
            rel_res = max((frob(evaluate(p, w) - I2) for p in targets for w in images), default=0.0)
        hom = relators_exact or rel_res <= tol
        ab = abelian_surjective(f)
        if i < len(d.witnesses):
            w = d.witnesses[i]
            fw = f(w)
            exact = fw.is_identity()
            tres = 0.0 if exact else max((frob(evaluate(p, fw) - I2) for p in targets), default=math.inf)
            killed = exact or tres <= tol
            srng = _rng(seed, _SOURCE, i)
            sources = [repvar.sample_on_variety(src, srng) for _ in range(samples)]
            smax = max((frob(evaluate(p, w) - I2) for p in sources), default=0.0)
            if not hom:
                status = "not-a-homomorphism"
            elif not ab:
                status = "not-surjective"
            elif not killed:
                status = "properness-uncertified"
            elif smax <= SURVIVE_TOL:
                status = "witness-vacuous"
            else:
                status = "certified"
            certs.append(MapCertificate(i, src.label, tgt.label, hom, relators_exact, rel_res, ab,
                                        src.format(w), killed, exact, tres, smax, status))
        else:
            status = "not-a-homomorphism" if not hom else (
                "not-surjective" if not ab else "missing-witness")
            certs.append(MapCertificate(i, src.label, tgt.label, hom, relators_exact, rel_res, ab,
                                        None, False, False, math.inf, 0.0, status))
    term_ok, detail = _certify_terminal(d)
    term = _terminal_map(d)
    surj = []
    if term is not None:
        for g in _composites(d):
            surj.append(generates_free_group([term(w) for w in g.images], d.terminal_rank))
    else:
        surj = [False] * len(d.stages)
    return CertificationReport(certs, surj, term_ok, detail, samples)


# -- dimension sequence ------------------------------------------------------

@dataclass
class StageReport:
    index: int
    name: str
    rank: int
    dimension: int | None
    exact: bool
    samples: int
    trusted_samples: int
    discarded: int
    estimates: list[repvar.DimensionEstimate] = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.dimension is not None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "name": self.name,
            "rank": self.rank,
            "dimension": self.dimension,
            "exact": self.exact,
            "conclusive": self.conclusive,
            "samples": self.samples,
            "trusted_samples": self.trusted_samples,
            "discarded": self.discarded,
            "estimates": [e.to_json() for e in self.estimates],
        }


@dataclass
class ResolutionReport:
    name: str
    seed: int
    certification: CertificationReport
    stages: list[StageReport]
    length: int
    source_rank: int
    terminal_rank: int

    @property
    def dimensions(self) -> list[int | None]:
        return [s.dimension for s in self.stages]

    @property
    def strict_decrease(self) -> list[bool]:
        d = self.dimensions
        return [a is not None and b is not None and b < a for a, b in zip(d, d[1:])]

    @property
    def bound(self) -> int:
        """``3(n - m)`` with a certified free terminus, otherwise ``3n``."""
        if self.certification.terminal_free:
            return 3 * (self.source_rank - self.terminal_rank)
        return 3 * self.source_rank

    @property
    def bound_holds(self) -> bool:
        return self.length <= self.bound

    @property
    def conclusive(self) -> bool:
        return all(s.conclusive for s in self.stages)

    @property
    def passed(self) -> bool:
        return (self.certification.certified and self.conclusive
                and all(self.strict_decrease) and self.bound_holds)

    def to_json(self) -> dict:
        caveat = None
        if not self.certification.terminal_free:
            caveat = ("terminus not certified free: its dimension is an estimate, so the "
                      "anchor d_k = 3m is unavailable, d_k is only bounded below by the "
                      "estimate, and the length is checked against 3n")
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "seed": self.seed,
            "assumptions": list(ASSUMPTIONS),
            "certification": self.certification.to_json(),
            "stages": [s.to_json() for s in self.stages],
            "dimensions": self.dimensions,
            "strict_decrease": self.strict_decrease,
            "bound": {
                "k": self.length,
                "n": self.source_rank,
                "m": self.terminal_rank,
                "three_n_minus_m": 3 * (self.source_rank - self.terminal_rank),
                "limit": self.bound,
                "free_terminus": self.certification.terminal_free,
                "holds": self.bound_holds,
                "caveat": caveat,
            },
            "inconclusive_stages": [s.index for s in self.stages if not s.conclusive],
            "passed": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _terminus_samples(d: ResolutionDescriptor, seed: int, count: int, radius: int,
                      delta: float) -> tuple[list[Representation], Presentation]:
    """Screened generic points of F_m (or of the last stage when it is not known free)."""
    rng = _rng(seed, _TERMINUS)
    term = _terminal_map(d)
    pres = term.target if term is not None else d.terminus
    # relators of a non-free terminus evaluate to I, so the word-ball screen only applies in F_m
    ball = word_ball(pres.rank, radius) if pres.rank and pres.is_free else []
    points = []
    for _ in range(50 * count):
        if len(points) == count:
            break
        if pres.is_free:
            p = Representation(pres, tuple(sl2c.sample_sl2(rng) for _ in range(pres.rank)))
        else:
            try:
                p = repvar.sample_on_variety(pres, rng)
            except CertificationError:
                continue
        if repvar.screen_nondegenerate(p, ball, delta):
            points.append(p)
    if len(points) < count:
        raise CertificationError(f"only {len(points)} of {count} terminus samples passed screening")
    return points, pres


def _apply_twists(point: Representation, twists, rng, epsilon, variety_tol) -> Representation | None:
    for t in twists:
        try:
            fam = flows.stage_family(point.presentation, point, t.kind, t.moved, t.element,
                                     epsilon=epsilon, rng=rng, variety_tol=variety_tol)
        except DegenerateElementError:
            continue
        z = complex(sl2c.sample_path_domain(rng, fam.epsilon, 1)[0])
        moved = flows.eval_family(fam, z)
        if not repvar.is_on_variety(moved, variety_tol).ok:
            return None
        point = moved
    return point


def dimension_sequence(d: ResolutionDescriptor, seed: int = 0, samples_per_stage: int = 20,
                       certification: CertificationReport | None = None, *,
                       radius: int = 3, delta: float = sl2c.DEFAULT_DELTA,
                       rank_tol: float = repvar.DEFAULT_RANK_TOL, variety_tol: float = 1e-8,
                       epsilon: float = 0.1) -> ResolutionReport:
    """Largest trusted local dimension at pulled-back points of every stage."""
    if certification is None:
        certification = certify_resolution(d, seed)
    terminus, pres = _terminus_samples(d, seed, samples_per_stage, radius, delta)
    term = _terminal_map(d)
    stages = []
    for i, (stage, g) in enumerate(zip(d.stages, _composites(d))):
        if stage.is_free:
            dim = 3 * stage.rank
            stages.append(StageReport(i, stage.label, stage.rank, dim, True, samples_per_stage,
                                      samples_per_stage, 0, []))
            continue
        to_terminus = compose(term, g) if term is not None else g
        trng = _rng(seed, _TWIST, i)
        estimates, discarded = [], 0
        for p in terminus:
            point = repvar.pullback(to_terminus, p)
            point = _apply_twists(point, d.twists[i], trng, epsilon, variety_tol)
            if point is None or not repvar.is_on_variety(point, variety_tol).ok:
                discarded += 1
                continue
            estimates.append(repvar.local_dimension(point, rank_tol, variety_tol))
        trusted = [e for e in estimates if e.trusted]
        dim = max((e.local_dim for e in trusted), default=None)
        stages.append(StageReport(i, stage.label, stage.rank, dim, False, samples_per_stage,
                                  len(trusted), discarded, estimates))
    return ResolutionReport(d.name, seed, certification, stages, d.length, d.stages[0].rank,
                            d.terminal_rank)


def verify_resolution(d: ResolutionDescriptor, seed: int = 0, samples: int = 20, *,
                      delta: float = sl2c.DEFAULT_DELTA) -> ResolutionReport:
    """Certification followed by the dimension sequence."""
    cert = certify_resolution(d, seed, samples)
    return dimension_sequence(d, seed, samples, cert, delta=delta)


__all__ = [
    "ResolutionDescriptor",
    "StageTwist",
    "descriptor_from_json",
    "load_resolution",
    "certify_resolution",
    "dimension_sequence",
    "verify_resolution",
    "CertificationReport",
    "MapCertificate",
    "ResolutionReport",
    "StageReport",
    "SCHEMA_VERSION",
]
