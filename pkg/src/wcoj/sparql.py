"""Frontend for the conjunctive basic-graph-pattern query subset.

Grammar: optional PREFIX declarations, SELECT with one or more variables,
WHERE with dot-separated triple patterns. Terms are ``?var``, ``<iri>``,
``prefix:local``, or ``"literal"``. Predicates must be constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dictionary import Dictionary
from .errors import QuerySyntaxError, UnresolvedPrefixError, UnsupportedFeatureError
from .ingest import PartitionedDatabase


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    value: str


Term = Variable | Constant


@dataclass
class ParsedQuery:
    prefixes: dict[str, str]
    output_vars: list[str]
    patterns: list[tuple[Term, Term, Term]]


_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<IRIREF><[^<>\s]*>)
      | (?P<LITERAL>"(?:[^"\\]|\\.)*")
      | (?P<VAR>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<PNAME>[A-Za-z_][A-Za-z0-9_\-]*:[A-Za-z0-9_\-.]*)
      | (?P<NAME>[A-Za-z_][A-Za-z0-9_\-]*)
      | (?P<LBRACE>\{)
      | (?P<RBRACE>\})
      | (?P<DOT>\.)
    """,
    re.X,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "WS":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str, what: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise QuerySyntaxError(f"expected {what}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def keyword(self, word: str) -> bool:
        tok = self.tokens[self.i]
        if tok[0] == "NAME" and tok[1].upper() == word:
            self.i += 1
            return True
        return False

    def parse(self) -> ParsedQuery:
        prefixes: dict[str, str] = {}
        while self.keyword("PREFIX"):
            kind, text, pos = self.peek()
            if kind != "PNAME" or not text.endswith(":"):
                raise QuerySyntaxError("expected 'name:' after PREFIX", pos)
            self.i += 1
            _, iri, _ = self.take("IRIREF", "an <iri> after the prefix name")
            prefixes[text[:-1]] = iri[1:-1]

        if not self.keyword("SELECT"):
            raise QuerySyntaxError("expected SELECT", self.peek()[2])
        out_vars: list[str] = []
        while self.peek()[0] == "VAR":
            out_vars.append(self.take("VAR", "variable")[1][1:])
        if not out_vars:
            raise QuerySyntaxError("SELECT needs at least one variable", self.peek()[2])

        if not self.keyword("WHERE"):
            raise QuerySyntaxError("expected WHERE", self.peek()[2])
        self.take("LBRACE", "'{'")

        patterns: list[tuple[Term, Term, Term]] = []
        while True:
            patterns.append(self._pattern(prefixes))
            kind = self.peek()[0]
            if kind == "DOT":
                self.i += 1
                if self.peek()[0] == "RBRACE":
                    break
                continue
            break
        self.take("RBRACE", "'}' or '.'")
        self.take("EOF", "end of query")

        pattern_vars = {
            t.name for pat in patterns for t in pat if isinstance(t, Variable)
        }
        for v in out_vars:
            if v not in pattern_vars:
                raise QuerySyntaxError(f"output variable ?{v} appears in no pattern", 0)
        return ParsedQuery(prefixes, out_vars, patterns)

    def _pattern(self, prefixes: dict[str, str]) -> tuple[Term, Term, Term]:
        s = self._term(prefixes)
        p = self._term(prefixes)
        if isinstance(p, Variable):
            raise UnsupportedFeatureError("variable predicates are not supported")
        o = self._term(prefixes)
        return (s, p, o)

    def _term(self, prefixes: dict[str, str]) -> Term:
        kind, text, pos = self.peek()
        self.i += 1
        if kind == "VAR":
            return Variable(text[1:])
        if kind == "IRIREF":
            return Constant(text[1:-1])
        if kind == "LITERAL":
            return Constant(text[1:-1])
        if kind == "PNAME":
            ns, local = text.split(":", 1)
            if ns not in prefixes:
                raise UnresolvedPrefixError(f"prefix {ns!r} is not declared")
            return Constant(prefixes[ns] + local)
        raise QuerySyntaxError(f"expected a term, found {text!r}", pos)


def parse_query(text: str) -> ParsedQuery:
    return _Parser(text).parse()


def _render_term(t: Term) -> str:
    if isinstance(t, Variable):
        return f"?{t.name}"
    return f"<{t.value}>"


def render_query(q: ParsedQuery) -> str:
    """Canonical text form; reparsing it reproduces the structure exactly.

    Constants render as full <iri> forms (literal objects were already kept
    verbatim at parse time, so both reparse to identical Constant terms).
    """
    lines = [f"PREFIX {ns}: <{iri}>" for ns, iri in q.prefixes.items()]
    lines.append("SELECT " + " ".join(f"?{v}" for v in q.output_vars))
    lines.append("WHERE {")
    body = [" ".join(_render_term(t) for t in pat) for pat in q.patterns]
    lines.append(" .\n".join(f"  {b}" for b in body))
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class ConjunctivePattern:
    predicate: str
    pred_key: int | None
    subject_var: str | None
    subject_term: str | None
    subject_key: int | None
    object_var: str | None
    object_term: str | None
    object_key: int | None

    @property
    def fully_constant(self) -> bool:
        return self.subject_var is None and self.object_var is None


@dataclass
class ConjunctiveQuery:
    output_vars: tuple[str, ...]
    patterns: list[ConjunctivePattern]

    @property
    def guaranteed_empty(self) -> bool:
        """True when some predicate or bound constant is absent from the data."""
        for p in self.patterns:
            if p.pred_key is None:
                return True
            if p.subject_var is None and p.subject_key is None:
                return True
            if p.object_var is None and p.object_key is None:
                return True
        return False

    @property
    def prefilters(self) -> list[ConjunctivePattern]:
        return [p for p in self.patterns if p.fully_constant]


def to_conjunctive(parsed: ParsedQuery, db: PartitionedDatabase) -> ConjunctiveQuery:
    """Resolve terms against the catalog/dictionary.

    Missing predicates or constants do not error: they mark the query as
    guaranteed-empty so execution can short-circuit before any join.
    """
    dictionary: Dictionary = db.dictionary
    patterns = []
    for s, p, o in parsed.patterns:
        assert isinstance(p, Constant)
        s_var = s.name if isinstance(s, Variable) else None
        o_var = o.name if isinstance(o, Variable) else None
        patterns.append(
            ConjunctivePattern(
                predicate=p.value,
                pred_key=dictionary.lookup(p.value),
                subject_var=s_var,
                subject_term=None if s_var else s.value,
                subject_key=None if s_var else dictionary.lookup(s.value),
                object_var=o_var,
                object_term=None if o_var else o.value,
                object_key=None if o_var else dictionary.lookup(o.value),
            )
        )
    return ConjunctiveQuery(tuple(parsed.output_vars), patterns)
