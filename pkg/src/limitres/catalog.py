"""Loading of shipped fixtures and user-supplied splitting files."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ParseError
from .splittings import OneEdgedSplitting, amalgam, hnn
from .textformat import SplitStanza, parse_document, parse_word, parse_word_list
from .words import Presentation, Word

_REQUIRED = {
    "amalgam": ("left", "right", "edge_left", "edge_right"),
    "hnn": ("vertex", "edge", "conj"),
}
_OPTIONAL = {
    "amalgam": ("twist", "name"),
    "hnn": ("letter", "twist", "name"),
}


def catalog_root() -> Path:
    return Path(str(resources.files("limitres") / "catalog"))


def catalog_file(*parts: str) -> Path:
    return catalog_root().joinpath(*parts)


@lru_cache(maxsize=None)
def catalog_groups() -> dict[str, Presentation]:
    """The shipped named groups (F1..F5, Z1..Z5, S2)."""
    return dict(parse_document(catalog_file("groups.txt").read_text()).groups)


def group(name: str) -> Presentation:
    try:
        return catalog_groups()[name]
    except KeyError:
        raise KeyError(f"no catalog group named {name!r}") from None


@dataclass(frozen=True, eq=False)
class SplitEntry:
    """A splitting together with the twisting element named in its stanza."""

    splitting: OneEdgedSplitting
    twist: Word | None
    line: int


def _lookup(groups, opts, key, line):
    value, col = opts[key]
    if value not in groups:
        raise ParseError(f"unknown group {value!r}", line, col)
    return groups[value]


def _words(opts, key, pres, line):
    value, col = opts[key]
    return parse_word_list(value, pres.names, line=line, col=col)


def build_splitting(stanza: SplitStanza, groups: dict[str, Presentation]) -> SplitEntry:
    opts, line, kind = stanza.options, stanza.line, stanza.kind
    for key, (_, col) in opts.items():
        if key not in _REQUIRED[kind] + _OPTIONAL[kind]:
            raise ParseError(f"unknown option {key!r} for split {kind}", line, col - len(key) - 1)
    for key in _REQUIRED[kind]:
        if key not in opts:
            raise ParseError(f"split {kind} needs {key}=", line, 1)
    name = opts.get("name", ("", 0))[0]
    try:
        if kind == "amalgam":
            left = _lookup(groups, opts, "left", line)
            right = _lookup(groups, opts, "right", line)
            s = amalgam(left, right, _words(opts, "edge_left", left, line),
                        _words(opts, "edge_right", right, line), name=name)
        else:
            vertex = _lookup(groups, opts, "vertex", line)
            letter = opts.get("letter", ("t", 0))[0]
            s = hnn(vertex, _words(opts, "edge", vertex, line), _words(opts, "conj", vertex, line),
                    stable_letter=letter, name=name)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), line, 1) from None
    twist = None
    if "twist" in opts:
        value, col = opts["twist"]
        twist = parse_word(value, s.twist_side.names, line, col)
    return SplitEntry(s, twist, line)


def load_splittings(text: str) -> list[SplitEntry]:
    """Every split stanza in a document; catalog groups may be referenced by name."""
    doc = parse_document(text, known=catalog_groups())
    if not doc.splits:
        raise ParseError("document contains no split stanza")
    return [build_splitting(st, doc.groups) for st in doc.splits]


def load_splitting_file(path: str | Path) -> list[SplitEntry]:
    return load_splittings(Path(path).read_text())


def catalog_splittings() -> dict[str, SplitEntry]:
    """Shipped splitting fixtures keyed by file stem."""
    out = {}
    for p in sorted(catalog_file("splittings").glob("*.split")):
        out[p.stem] = load_splitting_file(p)[0]
    return out


def load_group_file(path: str | Path) -> Presentation:
    """The single group in a text file, or a catalog group name."""
    p = Path(path)
    if not p.exists() and str(path) in catalog_groups():
        return catalog_groups()[str(path)]
    if not p.exists():
        raise ParseError(f"{path}: no such file and no catalog group of that name")
    doc = parse_document(p.read_text(), known=None)
    if len(doc.groups) != 1:
        raise ParseError(f"expected exactly one group stanza, found {len(doc.groups)}")
    return next(iter(doc.groups.values()))
