"""Reader for the plain-text presentation format.

A document is a sequence of stanzas::

    # comment
    group Z2
    gens: a b
    rels: [a,b]

    split hnn vertex=Z1 edge=a conj=a letter=b twist=a

Words use ``*`` (or juxtaposition) for products, ``^n`` for integer powers,
``[u,v]`` for ``u v u^-1 v^-1``, parentheses for grouping and ``1`` for the
identity.  Errors carry 1-based line and column numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParseError
from .words import Presentation, Word, commutator

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<op>[\^*\[\],()\-])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), col0 + pos))
        pos = m.end()
    return toks


class _WordParser:
    def __init__(self, text: str, names: Sequence[str], line: int = 1, col0: int = 1):
        self.names = list(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.rank = len(self.names)
        self.line = line
        self.end_col = col0 + len(text)
        self.toks = _tokenize(text, line, col0)
        self.pos = 0

    def error(self, msg, tok=None):
        col = tok.col if tok is not None else self.end_col
        raise ParseError(msg, self.line, col)

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, text=None):
        tok = self.peek()
        if tok is None:
            self.error(f"expected {text!r}, found end of input" if text else "unexpected end of input")
        if text is not None and tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}", tok)
        self.pos += 1
        return tok

    def parse(self) -> Word:
        if not self.toks:
            self.error("empty word")
        w = self.product()
        tok = self.peek()
        if tok is not None:
            self.error(f"unexpected {tok.text!r}", tok)
        return w

    def product(self) -> Word:
        w = self.power()
        while True:
            tok = self.peek()
            if tok is None or tok.text in (",", "]", ")"):
                return w
            if tok.text == "*":
                self.take()
            w = w * self.power()

    def power(self) -> Word:
        w = self.atom()
        tok = self.peek()
        if tok is not None and tok.text == "^":
            self.take()
            sign = 1
            nxt = self.peek()
            if nxt is not None and nxt.text == "-":
                self.take()
                sign = -1
            num = self.take()
            if num.kind != "int":
                self.error(f"expected an integer exponent, found {num.text!r}", num)
            w = w ** (sign * int(num.text))
        return w

    def atom(self) -> Word:
        tok = self.take()
        if tok.text == "[":
            u = self.product()
            self.take(",")
            v = self.product()
            self.take("]")
            return commutator(u, v)
        if tok.text == "(":
            w = self.product()
            self.take(")")
            return w
        if tok.kind == "int":
            if tok.text != "1":
                self.error(f"only 1 may stand for a group element, found {tok.text!r}", tok)
            return Word.identity(self.rank)
        if tok.kind == "ident":
            return self.identifier(tok)
        self.error(f"unexpected {tok.text!r}", tok)

    def identifier(self, tok: _Tok) -> Word:
        if tok.text in self.index:
            return Word.generator(self.rank, self.index[tok.text])
        # juxtaposed generator names without whitespace, e.g. "ab"
        letters = []
        rest = tok.text
        offset = 0
        while rest:
            for n in sorted(self.names, key=len, reverse=True):
                if rest.startswith(n):
                    letters.append((self.index[n], 1))
                    rest = rest[len(n):]
                    offset += len(n)
                    break
            else:
                raise ParseError(f"unknown generator in {tok.text!r}", self.line, tok.col + offset)
        return Word(self.rank, tuple(letters))


def parse_word(text: str, names: Sequence[str], line: int = 1, col: int = 1) -> Word:
    """Parse a single word over the given generator names."""
    return _WordParser(text, names, line, col).parse()


def split_top_level(text: str, sep: str, col0: int = 1) -> list[tuple[str, int]]:
    """Split on ``sep`` outside brackets; returns (piece, starting column)."""
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        elif ch == sep and depth == 0:
            pieces.append((text[start:i], col0 + start))
            start = i + 1
    pieces.append((text[start:], col0 + start))
    return pieces


def parse_word_list(text: str, names: Sequence[str], sep: str = ",", line: int = 1,
                    col: int = 1) -> list[Word]:
    """Parse a ``sep``-separated list of words; an all-blank string is the empty list."""
    if not text.strip():
        return []
    words = []
    for piece, c in split_top_level(text, sep, col):
        if not piece.strip():
            raise ParseError("empty entry in word list", line, c)
        words.append(parse_word(piece, names, line, c))
    return words


@dataclass
class SplitStanza:
    kind: str
    options: dict[str, tuple[str, int]]
    line: int


@dataclass
class Document:
    groups: dict[str, Presentation] = field(default_factory=dict)
    splits: list[SplitStanza] = field(default_factory=list)


_KEY = re.compile(r"(?:^|\s)([A-Za-z_]+)=")


def _parse_options(body: str, line: int, col0: int) -> dict[str, tuple[str, int]]:
    matches = list(_KEY.finditer(body))
    if body.strip() and (not matches or body[: matches[0].start()].strip()):
        raise ParseError("expected key=value options", line, col0)
    opts = {}
    for k, m in enumerate(matches):
        end = matches[k + 1].start() if k + 1 < len(matches) else len(body)
        key = m.group(1)
        if key in opts:
            raise ParseError(f"duplicate option {key!r}", line, col0 + m.start(1))
        opts[key] = (body[m.end():end].strip(), col0 + m.end())
    return opts


def parse_document(text: str, known: dict[str, Presentation] | None = None) -> Document:
    """Parse group and split stanzas.  ``known`` groups may be referenced by name."""
    doc = Document()
    pending = None  # [name, gens, rels-lines, line]

    def finish():
        nonlocal pending
        if pending is None:
            return
        name, gens, rel_lines, line = pending
        if gens is None:
            raise ParseError(f"group {name!r} has no gens: line", line, 1)
        rels = []
        for body, ln, col in rel_lines:
            if not body.strip():
                continue
            for piece, c in split_top_level(body, ";", col):
                if not piece.strip():
                    raise ParseError("empty relator", ln, c)
                w = parse_word(piece, gens, ln, c)
                if w.is_identity():
                    raise ParseError("relator reduces to the identity", ln, c)
                rels.append(w)
        doc.groups[name] = Presentation(tuple(gens), tuple(rels), name)
        pending = None

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        head, _, rest = stripped.partition(" ")
        if head == "group":
            finish()
            name = rest.strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.\-]*", name):
                raise ParseError(f"invalid group name {name!r}", ln, indent + 7)
            if name in doc.groups:
                raise ParseError(f"group {name!r} defined twice", ln, indent + 7)
            pending = [name, None, [], ln]
        elif stripped.startswith("gens:"):
            if pending is None:
                raise ParseError("gens: outside a group stanza", ln, indent + 1)
            gens = stripped[5:].split()
            for g in gens:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", g):
                    raise ParseError(f"invalid generator name {g!r}", ln,
                                     indent + 1 + stripped.index(g, 5))
            if len(set(gens)) != len(gens):
                raise ParseError("duplicate generator name", ln, indent + 6)
            pending[1] = gens
        elif stripped.startswith("rels:"):
            if pending is None or pending[1] is None:
                raise ParseError("rels: must follow gens: inside a group stanza", ln, indent + 1)
            pending[2].append((stripped[5:], ln, indent + 6))
        elif head == "split":
            finish()
            kind, _, body = rest.strip().partition(" ")
            if kind not in ("amalgam", "hnn"):
                raise ParseError(f"unknown splitting kind {kind!r}", ln, indent + 7)
            col0 = indent + 1 + stripped.index(body) if body else indent + 1
            doc.splits.append(SplitStanza(kind, _parse_options(body, ln, col0), ln))
        else:
            raise ParseError(f"unrecognized line starting with {head!r}", ln, indent + 1)
    finish()
    if known:
        merged = dict(known)
        merged.update(doc.groups)
        doc.groups = merged
    return doc


def parse_presentation(text: str) -> Presentation:
    """Parse a document holding exactly one group stanza."""
    doc = parse_document(text)
    if len(doc.groups) != 1:
        raise ParseError(f"expected exactly one group, found {len(doc.groups)}")
    return next(iter(doc.groups.values()))


def format_presentation(p: Presentation) -> str:
    rels = " ; ".join(p.format(r) for r in p.relators)
    return f"group {p.name or 'G'}\ngens: {' '.join(p.names)}\nrels: {rels}\n"
