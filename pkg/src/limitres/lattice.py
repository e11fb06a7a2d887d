"""Trees of groups alternating free factorizations and abelian JSJ pieces.

Depth 0 is the root group.  Odd depths hold the pieces of a free
factorization (``free-factor-level`` nodes, plus free or abelian factors);
even depths hold groups and JSJ vertex groups.  A node at depth ``d`` sits on
integer level ``d // 2``, and the height of a tree is the largest integer
level reached.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from .errors import LatticeError, ParseError
from .textformat import parse_word_list
from .words import Presentation

GROUP = "group"
FREE_FACTOR_LEVEL = "free-factor-level"
RIGID = "rigid"
ABELIAN = "abelian"
QH = "quadratically-hanging"
FREE = "free"

KINDS = (GROUP, FREE_FACTOR_LEVEL, RIGID, ABELIAN, QH, FREE)
LEAF_KINDS = frozenset({FREE, ABELIAN})
# kinds allowed at even depth, and as children of a free-factor-level node
INTEGER_KINDS = frozenset({GROUP, RIGID, ABELIAN, QH, FREE})
# kinds allowed at odd depth, as children of an integer-level node
FACTOR_KINDS = frozenset({FREE_FACTOR_LEVEL, FREE, ABELIAN})

CAVEAT = ("decompositions are trusted input: tree structure is validated, "
          "the claimed free factorizations and JSJ splittings are not")


@dataclass(frozen=True)
class LatticeNode:
    label: str
    kind: str
    children: tuple[LatticeNode, ...] = ()
    presentation: Presentation | None = field(default=None, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.kind not in KINDS:
            raise LatticeError(f"unknown node kind {self.kind!r} at {self.label!r}")
        if self.kind in LEAF_KINDS and self.children:
            raise LatticeError(f"{self.kind} node {self.label!r} cannot have children")
        allowed = INTEGER_KINDS if self.kind == FREE_FACTOR_LEVEL else FACTOR_KINDS
        for c in self.children:
            if c.kind not in allowed:
                raise LatticeError(
                    f"{c.kind} node {c.label!r} cannot sit directly below {self.kind} node {self.label!r}"
                )

    def walk(self, depth: int = 0) -> Iterator[tuple[LatticeNode, int]]:
        yield self, depth
        for c in self.children:
            yield from c.walk(depth + 1)


def node_height(node: LatticeNode) -> int:
    """Height of the tree rooted at an integer-level node."""
    if node.kind == FREE_FACTOR_LEVEL:
        raise LatticeError("height is measured from an integer-level node")
    return max(d for _, d in node.walk()) // 2


@dataclass(frozen=True)
class AnalysisLattice:
    root: LatticeNode
    declared_rank: int | None = None

    def __post_init__(self):
        if self.root.kind not in INTEGER_KINDS:
            raise LatticeError(f"the root cannot be a {self.root.kind} node")
        labels = [n.label for n, _ in self.root.walk()]
        dup = {x for x in labels if labels.count(x) > 1}
        if dup:
            raise LatticeError(f"duplicate node labels {sorted(dup)}")
        if self.declared_rank is not None and self.declared_rank < 0:
            raise LatticeError("declared rank must be non-negative")

    @property
    def height(self) -> int:
        return node_height(self.root)

    def find(self, label: str) -> tuple[LatticeNode, int]:
        for n, d in self.root.walk():
            if n.label == label:
                return n, d
        raise LatticeError(f"no node labelled {label!r}")


def height(lat: AnalysisLattice) -> int:
    return lat.height


def _replace(node: LatticeNode, label: str, fn) -> LatticeNode:
    if node.label == label:
        return fn(node)
    return LatticeNode(node.label, node.kind, tuple(_replace(c, label, fn) for c in node.children),
                       node.presentation)


def graft(lat: AnalysisLattice, target: str, subtree: LatticeNode) -> AnalysisLattice:
    """Attach ``subtree`` at the leaf labelled ``target``.

    An integer-level leaf is replaced by the subtree; a free-factor-level leaf
    receives it as its only child.
    """
    node, depth = lat.find(target)
    if node.children:
        raise LatticeError(f"graft target {target!r} is not a leaf")
    if subtree.kind not in INTEGER_KINDS:
        raise LatticeError("a grafted subtree must be rooted at an integer-level node")
    if depth % 2 == 0:
        root = _replace(lat.root, target, lambda _: subtree)
    else:
        root = _replace(lat.root, target,
                        lambda n: LatticeNode(n.label, n.kind, (subtree,), n.presentation))
    return AnalysisLattice(root, lat.declared_rank)


def combine(label: str, vertex_trees: list[LatticeNode], rank: int | None = None) -> AnalysisLattice:
    """A root group with one freely indecomposable factor whose JSJ vertex
    groups carry the given trees; height is one more than the tallest."""
    factor = LatticeNode(f"{label}/factor", FREE_FACTOR_LEVEL, tuple(vertex_trees))
    return AnalysisLattice(LatticeNode(label, GROUP, (factor,)), rank)


@dataclass
class BoundReport:
    height: int
    rank: int | None
    resolution_length: int | None
    violations: list[str]
    caveat: str = CAVEAT

    @property
    def rank_bound(self) -> int | None:
        return None if self.rank is None else 3 * self.rank

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "rank": self.rank,
            "rank_bound": self.rank_bound,
            "within_rank_bound": None if self.rank is None else self.height <= self.rank_bound,
            "resolution_length": self.resolution_length,
            "within_length_bound": (None if self.resolution_length is None
                                    else self.height <= self.resolution_length),
            "violations": list(self.violations),
            "passed": self.passed,
            "caveat": self.caveat,
        }


def check_bound(lat: AnalysisLattice, resolution_length: int | None = None,
                rank: int | None = None) -> BoundReport:
    """Compare the height with ``3 * rank`` and, if given, a resolution length.

    A violation means the supplied decomposition is inconsistent; it is
    reported, never raised.
    """
    n = rank if rank is not None else lat.declared_rank
    h = lat.height
    violations = []
    if n is None:
        violations.append("no rank declared; the 3*rank bound cannot be checked")
    elif h > 3 * n:
        violations.append(f"height {h} exceeds 3*rank = {3 * n}")
    if resolution_length is not None and h > resolution_length:
        violations.append(f"height {h} exceeds the resolution length {resolution_length}")
    return BoundReport(h, n, resolution_length, violations)


# -- documents ---------------------------------------------------------------

def _node_from_json(data, path: str) -> LatticeNode:
    if not isinstance(data, dict):
        raise LatticeError(f"{path}: expected an object")
    unknown = set(data) - {"label", "kind", "children", "presentation"}
    if unknown:
        raise LatticeError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        label, kind = data["label"], data["kind"]
    except KeyError as exc:
        raise LatticeError(f"{path}: missing {exc.args[0]!r}") from None
    if not isinstance(label, str) or not label or "\n" in label:
        raise LatticeError(f"{path}: label must be a non-empty single-line string")
    pres = None
    if data.get("presentation") is not None:
        pres = _presentation_from_json(data["presentation"], label)
    children = data.get("children", [])
    if not isinstance(children, list):
        raise LatticeError(f"{path}: children must be a list")
    kids = tuple(_node_from_json(c, f"{path}/{i}") for i, c in enumerate(children))
    return LatticeNode(label, kind, kids, pres)


def _presentation_from_json(data, label) -> Presentation:
    gens = data.get("gens", [])
    rels = data.get("rels", [])
    words = [w for r in rels for w in parse_word_list(r, gens)]
    return Presentation(tuple(gens), tuple(words), label)


def _node_to_json(node: LatticeNode) -> dict:
    out = {"label": node.label, "kind": node.kind}
    if node.presentation is not None:
        p = node.presentation
        out["presentation"] = {"gens": list(p.names), "rels": [p.format(r) for r in p.relators]}
    out["children"] = [_node_to_json(c) for c in node.children]
    return out


def lattice_from_json(data) -> AnalysisLattice:
    if isinstance(data, dict) and "root" in data:
        rank = data.get("rank")
        if rank is not None and (not isinstance(rank, int) or isinstance(rank, bool)):
            raise LatticeError("rank must be an integer")
        return AnalysisLattice(_node_from_json(data["root"], "root"), rank)
    return AnalysisLattice(_node_from_json(data, "root"))


def lattice_to_json(lat: AnalysisLattice) -> dict:
    return {"rank": lat.declared_rank, "root": _node_to_json(lat.root)}


def parse_lattice_text(text: str) -> AnalysisLattice:
    """Indented ``kind:label`` lines, two spaces per depth; optional ``rank: n`` header."""
    rank = None
    stack: list[tuple[int, str, str, list]] = []
    root = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip(" "))
        body = line.strip()
        if body.startswith("rank:"):
            if root is not None or stack or rank is not None:
                raise ParseError("rank: must be the first line", ln, indent + 1)
            try:
                rank = int(body[5:])
            except ValueError:
                raise ParseError("rank must be an integer", ln, indent + 6) from None
            continue
        if indent % 2:
            raise ParseError("indentation must be a multiple of two spaces", ln, 1)
        depth = indent // 2
        kind, sep, label = body.partition(":")
        if not sep or not label.strip():
            raise ParseError("expected kind:label", ln, indent + 1)
        if kind not in KINDS:
            raise ParseError(f"unknown node kind {kind!r}", ln, indent + 1)
        if root is not None and not stack:
            raise ParseError("a lattice has a single root", ln, 1)
        if depth > len(stack) or (depth == 0 and stack):
            raise ParseError("indentation skips a level", ln, 1)
        while len(stack) > depth:
            _close(stack)
        if stack:
            parent = stack[-1][1]
            allowed = INTEGER_KINDS if parent == FREE_FACTOR_LEVEL else FACTOR_KINDS
            if parent in LEAF_KINDS or kind not in allowed:
                raise ParseError(f"{kind} node cannot sit directly below a {parent} node", ln,
                                 indent + 1)
        stack.append((ln, kind, label.strip(), []))
        if depth == 0:
            root = stack[0]
    if root is None:
        raise ParseError("empty lattice document")
    try:
        while len(stack) > 1:
            _close(stack)
        ln, kind, label, kids = stack[0]
        return AnalysisLattice(LatticeNode(label, kind, tuple(kids)), rank)
    except LatticeError as exc:
        raise ParseError(str(exc)) from None


def _close(stack):
    ln, kind, label, kids = stack.pop()
    try:
        node = LatticeNode(label, kind, tuple(kids))
    except LatticeError as exc:
        raise ParseError(str(exc), ln, 1) from None
    stack[-1][3].append(node)


def format_lattice_text(lat: AnalysisLattice) -> str:
    lines = [] if lat.declared_rank is None else [f"rank: {lat.declared_rank}"]
    for node, depth in lat.root.walk():
        lines.append(f"{'  ' * depth}{node.kind}:{node.label}")
    return "\n".join(lines) + "\n"


def parse_lattice(document: str) -> AnalysisLattice:
    """Parse a JSON or indented-text lattice document."""
    stripped = document.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        return lattice_from_json(data)
    return parse_lattice_text(document)


def serialize_lattice(lat: AnalysisLattice, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(lattice_to_json(lat), indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        if any(n.presentation is not None for n, _ in lat.root.walk()):
            raise LatticeError("the text form does not carry presentations")
        return format_lattice_text(lat)
    raise ValueError(f"unknown lattice format {fmt!r}")
