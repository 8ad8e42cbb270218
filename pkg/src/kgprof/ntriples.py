"""Streaming N-Triples reader.

The parser is line based and single pass.  Each line is matched against a
regular expression for the N-Triples grammar; lines without escape sequences
take a fast path in which the raw tokens already are the canonical form.
Gzip input is detected by its magic bytes.
"""

from __future__ import annotations

import gzip
import io
import json
import os
import re
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import BinaryIO, Iterator, Optional, Union

__all__ = [
    "Kind",
    "Term",
    "TripleRecord",
    "ParseReport",
    "ParseError",
    "NTriplesParser",
    "parse_ntriples",
    "serialize_triple",
]

MAX_SKIPPED_OFFSETS = 10


class Kind(str, Enum):
    IRI = "IRI"
    BLANK = "BlankNode"
    LITERAL = "Literal"


class ParseError(ValueError):
    """Raised in strict mode on the first malformed or undecodable line."""

    def __init__(self, message, line_number, byte_offset):
        super().__init__(f"line {line_number} (byte {byte_offset}): {message}")
        self.line_number = line_number
        self.byte_offset = byte_offset


_UCHAR = r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"
_IRIREF = r"<(?:[^\x00-\x20<>\"{}|^`\\]|" + _UCHAR + r")+>"
_BNODE = r"_:[^\s<>\".](?:[^\s<>\"]*[^\s<>\".])?"
_LANG = r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"
_STRING = r"\"(?:[^\"\\\n\r]|\\[tbnrf\"'\\]|" + _UCHAR + r")*\""
_LITERAL = _STRING + r"(?:" + _LANG + r"|\^\^" + _IRIREF + r")?"

_TRIPLE_RE = re.compile(
    r"[ \t]*(" + _IRIREF + "|" + _BNODE + r")[ \t]*"
    r"(" + _IRIREF + r")[ \t]*"
    r"(" + _IRIREF + "|" + _BNODE + "|" + _LITERAL + r")[ \t]*\.[ \t]*(?:#.*)?"
)
_TERM_RE = re.compile(
    r"(" + _IRIREF + r")|(" + _BNODE + r")|(" + _STRING + r")(?:(" + _LANG + r")|\^\^(" + _IRIREF + r"))?"
)
_ESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|([tbnrf\"'\\]))")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_FORBIDDEN_IN_IRI = re.compile(r"[\x00-\x20<>\"{}|^`\\]")


def _unescape_sub(match):
    small, big, echar = match.groups()
    if echar is not None:
        return _ECHAR[echar]
    return chr(int(small or big, 16))


def _unescape(text):
    if "\\" not in text:
        return text
    return _ESCAPE_RE.sub(_unescape_sub, text)


def _escape_literal(text):
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r")


@dataclass(frozen=True, slots=True)
class Term:
    """An RDF term.  ``datatype`` is the bare datatype IRI, without brackets."""

    kind: Kind
    lexical: str
    datatype: Optional[str] = None
    lang_tag: Optional[str] = None

    def __post_init__(self):
        if self.kind is Kind.LITERAL:
            if self.datatype is not None and self.lang_tag is not None:
                raise ValueError("a literal has either a datatype or a language tag, not both")
        elif self.datatype is not None or self.lang_tag is not None:
            raise ValueError(f"{self.kind.value} terms carry no datatype or language tag")
        if self.kind is Kind.IRI and (not self.lexical or _FORBIDDEN_IN_IRI.search(self.lexical)):
            raise ValueError(f"invalid IRI {self.lexical!r}")
        if self.kind is Kind.BLANK and (not self.lexical or self.lexical != self.lexical.strip()):
            raise ValueError(f"invalid blank node label {self.lexical!r}")

    @classmethod
    def iri(cls, value):
        return cls(Kind.IRI, value)

    @classmethod
    def blank(cls, label):
        return cls(Kind.BLANK, label)

    @classmethod
    def literal(cls, value, datatype=None, lang_tag=None):
        return cls(Kind.LITERAL, value, datatype, lang_tag)

    @property
    def is_literal(self):
        return self.kind is Kind.LITERAL

    def key(self):
        """Canonical N-Triples serialization; also the dictionary key in the index."""
        if self.kind is Kind.IRI:
            return "<" + self.lexical + ">"
        if self.kind is Kind.BLANK:
            return "_:" + self.lexical
        text = '"' + _escape_literal(self.lexical) + '"'
        if self.lang_tag is not None:
            return text + "@" + self.lang_tag
        if self.datatype is not None:
            return text + "^^<" + self.datatype + ">"
        return text

    @classmethod
    def from_key(cls, key):
        """Inverse of :meth:`key` (accepts any single N-Triples term)."""
        m = _TERM_RE.fullmatch(key)
        if m is None:
            raise ValueError(f"not an N-Triples term: {key!r}")
        iri_tok, bnode, string, lang, dtype = m.groups()
        if iri_tok is not None:
            return cls(Kind.IRI, _unescape(iri_tok[1:-1]))
        if bnode is not None:
            return cls(Kind.BLANK, bnode[2:])
        datatype = _unescape(dtype[1:-1]) if dtype is not None else None
        return cls(Kind.LITERAL, _unescape(string[1:-1]), datatype, lang[1:] if lang else None)

    def __str__(self):
        return self.key()


@dataclass(frozen=True, slots=True)
class TripleRecord:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.predicate.kind is not Kind.IRI:
            raise ValueError("predicate must be an IRI")
        if self.subject.kind is Kind.LITERAL:
            raise ValueError("subject cannot be a literal")

    def keys(self):
        return self.subject.key(), self.predicate.key(), self.object.key()

    @classmethod
    def from_keys(cls, s, p, o):
        return cls(Term.from_key(s), Term.from_key(p), Term.from_key(o))


def serialize_triple(triple):
    """One canonical N-Triples line (without newline)."""
    s, p, o = triple.keys() if isinstance(triple, TripleRecord) else triple
    return f"{s} {p} {o} ."


@dataclass
class ParseReport:
    triples_emitted: int = 0
    lines_skipped: int = 0
    lines_read: int = 0
    skipped_offsets: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _canonical(token):
    """Canonical key of a matched token that contains escape sequences."""
    term = Term.from_key(token)
    if term.kind is Kind.IRI and _FORBIDDEN_IN_IRI.search(term.lexical):
        raise ValueError("escaped IRI decodes to forbidden characters")
    return term.key()


def _open_binary(source):
    if isinstance(source, (str, os.PathLike)):
        stream = open(source, "rb")
    elif isinstance(source, (bytes, bytearray)):
        stream = io.BytesIO(source)
    else:
        stream = source
    if not hasattr(stream, "peek"):
        stream = io.BufferedReader(stream) if isinstance(stream, io.RawIOBase) else _Peekable(stream)
    if stream.peek(2)[:2] == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=stream, mode="rb")
    return stream


class _Peekable:
    """Minimal ``peek`` support for streams that lack it."""

    def __init__(self, stream):
        self._stream = stream
        self._head = b""

    def peek(self, n):
        if len(self._head) < n:
            self._head += self._stream.read(n - len(self._head))
        return self._head

    def read(self, n=-1):
        head, self._head = self._head, b""
        if n is None or n < 0:
            return head + self._stream.read()
        return head + self._stream.read(n - len(head)) if n > len(head) else head[:n]

    def close(self):
        close = getattr(self._stream, "close", None)
        if close is not None:
            close()

    def readline(self):
        if self._head:
            head, self._head = self._head, b""
            if b"\n" in head:
                line, rest = head.split(b"\n", 1)
                self._head = rest
                return line + b"\n"
            return head + self._stream.readline()
        return self._stream.readline()

    def __iter__(self):
        while True:
            line = self.readline()
            if not line:
                return
            yield line


class NTriplesParser:
    """Iterable over the triples of one N-Triples source.

    Iterate it to obtain :class:`TripleRecord` objects, or call
    :meth:`iter_keys` for canonical ``(s, p, o)`` string tuples (cheaper, used
    by the indexer).  ``report`` is complete once iteration has finished.
    A parser instance can be iterated only once.
    """

    def __init__(self, source: Union[str, os.PathLike, BinaryIO, bytes], strict: bool = False):
        self.source = source
        self.strict = strict
        self.report = ParseReport()
        self._consumed = False

    def _skip(self, message, line_number, offset):
        if self.strict:
            raise ParseError(message, line_number, offset)
        self.report.lines_skipped += 1
        if len(self.report.skipped_offsets) < MAX_SKIPPED_OFFSETS:
            self.report.skipped_offsets.append(offset)

    def iter_keys(self) -> Iterator[tuple]:
        if self._consumed:
            raise RuntimeError("parser already consumed")
        self._consumed = True
        stream = _open_binary(self.source)
        close = isinstance(self.source, (str, os.PathLike)) or stream is not self.source
        errors = "strict" if self.strict else "replace"
        match = _TRIPLE_RE.fullmatch
        report = self.report
        offset = 0
        try:
            for line_number, raw in enumerate(stream, 1):
                start = offset
                offset += len(raw)
                report.lines_read = line_number
                try:
                    line = raw.decode("utf-8", errors)
                except UnicodeDecodeError as exc:
                    self._skip(f"invalid UTF-8: {exc.reason}", line_number, start)
                    continue
                line = line.rstrip("\r\n")
                stripped = line.strip()
                if not stripped or stripped[0] == "#":
                    continue
                m = match(line)
                if m is None:
                    self._skip("not a valid N-Triples statement", line_number, start)
                    continue
                s, p, o = m.groups()
                if "\\" in line:
                    try:
                        s, p, o = _canonical(s), _canonical(p), _canonical(o)
                    except ValueError as exc:
                        self._skip(str(exc), line_number, start)
                        continue
                report.triples_emitted += 1
                yield s, p, o
        finally:
            if close:
                stream.close()

    def __iter__(self) -> Iterator[TripleRecord]:
        for s, p, o in self.iter_keys():
            yield TripleRecord.from_keys(s, p, o)


def parse_ntriples(source, strict=False):
    """Create a parser over ``source`` (path, bytes, or binary stream).

    Tolerant mode (the default) counts and skips malformed lines; strict mode
    raises :class:`ParseError` on the first one.  Comments and blank lines are
    neither emitted nor counted as skipped.
    """
    return NTriplesParser(source, strict=strict)
