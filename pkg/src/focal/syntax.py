"""Terms and formulas of the FOCAL authorization language.

Everything here is an immutable tree.  Formulas compare up to renaming of
bound variables through a nameless canonical form (`canon`); contexts,
worldviews and probe sets all deduplicate through it.

Surface grammar, loosest to tightest: `->` (right associative), `\\/`, `/\\`,
`!`, `says`.  `speaksfor` and `=` form atoms.  Quantifier bodies extend as
far right as possible.  Comments run from `#` to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fun:
    name: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "%s(%s)" % (self.name, ", ".join(str(a) for a in self.args))


Term = Union[Var, Fun]


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Truth:
    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Falsity:
    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class RelApp:
    name: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class TermEq:
    left: Term
    right: Term

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Says:
    speaker: Term
    body: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class SpeaksFor:
    left: Term
    right: Term

    def __str__(self) -> str:
        return print_formula(self)


Formula = Union[
    Truth, Falsity, RelApp, TermEq, And, Or, Implies, Not,
    Forall, Exists, Says, SpeaksFor,
]

TRUE = Truth()
FALSE = Falsity()


# --------------------------------------------------------------------------
# signatures


class SignatureError(Exception):
    pass


@dataclass(frozen=True)
class Signature:
    """Function and relation symbols with arities, plus principal names.

    Principal names are nullary function symbols singled out so that every
    principal can be spoken about by a term.  A name may not be declared as
    both a function and a relation; variables are whatever identifiers are
    left over, so the split keeps parsing unambiguous.
    """

    functions: Mapping[str, int]
    relations: Mapping[str, int]
    principals: frozenset[str] = frozenset()

    def __post_init__(self):
        overlap = set(self.functions) & set(self.relations)
        if overlap:
            raise SignatureError(
                "symbols declared as both function and relation: %s"
                % ", ".join(sorted(overlap)))
        for p in self.principals:
            if self.functions.get(p) != 0:
                raise SignatureError(
                    "principal name %r must be a nullary function symbol" % p)

    def merged(self, other: "Signature") -> "Signature":
        fns = dict(self.functions)
        rels = dict(self.relations)
        for name, ar in other.functions.items():
            if fns.setdefault(name, ar) != ar:
                raise SignatureError("arity clash for function %r" % name)
        for name, ar in other.relations.items():
            if rels.setdefault(name, ar) != ar:
                raise SignatureError("arity clash for relation %r" % name)
        return Signature(fns, rels, self.principals | other.principals)


def validate_term(tau: Term, sig: Signature) -> None:
    """Raise SignatureError when tau misuses the signature."""
    match tau:
        case Var(name):
            if name in sig.functions or name in sig.relations:
                raise SignatureError("variable %r shadows a declared symbol" % name)
        case Fun(name, args):
            arity = sig.functions.get(name)
            if arity is None:
                raise SignatureError("unknown function symbol %r" % name)
            if arity != len(args):
                raise SignatureError(
                    "function %r expects %d argument(s), got %d"
                    % (name, arity, len(args)))
            for a in args:
                validate_term(a, sig)


def validate_formula(phi: Formula, sig: Signature) -> None:
    match phi:
        case Truth() | Falsity():
            pass
        case RelApp(name, args):
            arity = sig.relations.get(name)
            if arity is None:
                raise SignatureError("unknown relation symbol %r" % name)
            if arity != len(args):
                raise SignatureError(
                    "relation %r expects %d argument(s), got %d"
                    % (name, arity, len(args)))
            for a in args:
                validate_term(a, sig)
        case TermEq(l, r) | SpeaksFor(l, r):
            validate_term(l, sig)
            validate_term(r, sig)
        case And(l, r) | Or(l, r) | Implies(l, r):
            validate_formula(l, sig)
            validate_formula(r, sig)
        case Not(b):
            validate_formula(b, sig)
        case Forall(x, b) | Exists(x, b):
            if x in sig.functions or x in sig.relations:
                raise SignatureError("bound variable %r shadows a declared symbol" % x)
            validate_formula(b, sig)
        case Says(t, b):
            validate_term(t, sig)
            validate_formula(b, sig)
        case _:
            raise SignatureError("not a formula: %r" % (phi,))


# --------------------------------------------------------------------------
# free variables, canonical form, alpha equivalence


def term_vars(tau: Term) -> frozenset[str]:
    match tau:
        case Var(name):
            return frozenset((name,))
        case Fun(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= term_vars(a)
            return out
    raise TypeError("not a term: %r" % (tau,))


@lru_cache(maxsize=None)
def free_vars(phi: Formula) -> frozenset[str]:
    match phi:
        case Truth() | Falsity():
            return frozenset()
        case RelApp(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= term_vars(a)
            return out
        case TermEq(l, r) | SpeaksFor(l, r):
            return term_vars(l) | term_vars(r)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return free_vars(l) | free_vars(r)
        case Not(b):
            return free_vars(b)
        case Forall(x, b) | Exists(x, b):
            return free_vars(b) - {x}
        case Says(t, b):
            return term_vars(t) | free_vars(b)
    raise TypeError("not a formula: %r" % (phi,))


def _canon_term(tau: Term, env: tuple[str, ...]) -> tuple:
    match tau:
        case Var(name):
            for i, bound in enumerate(reversed(env)):
                if bound == name:
                    return ("b", i)
            return ("v", name)
        case Fun(name, args):
            return ("f", name, tuple(_canon_term(a, env) for a in args))
    raise TypeError("not a term: %r" % (tau,))


def _canon(phi: Formula, env: tuple[str, ...]) -> tuple:
    match phi:
        case Truth():
            return ("true",)
        case Falsity():
            return ("false",)
        case RelApp(name, args):
            return ("rel", name, tuple(_canon_term(a, env) for a in args))
        case TermEq(l, r):
            return ("eq", _canon_term(l, env), _canon_term(r, env))
        case And(l, r):
            return ("and", _canon(l, env), _canon(r, env))
        case Or(l, r):
            return ("or", _canon(l, env), _canon(r, env))
        case Implies(l, r):
            return ("imp", _canon(l, env), _canon(r, env))
        case Not(b):
            return ("not", _canon(b, env))
        case Forall(x, b):
            return ("all", _canon(b, env + (x,)))
        case Exists(x, b):
            return ("ex", _canon(b, env + (x,)))
        case Says(t, b):
            return ("says", _canon_term(t, env), _canon(b, env))
        case SpeaksFor(l, r):
            return ("sf", _canon_term(l, env), _canon_term(r, env))
    raise TypeError("not a formula: %r" % (phi,))


@lru_cache(maxsize=None)
def canon(phi: Formula) -> tuple:
    """Nameless form of phi: bound variables become binder-distance indices."""
    return _canon(phi, ())


def alpha_equal(a: Formula, b: Formula) -> bool:
    """True when a and b differ at most in the names of bound variables."""
    return canon(a) == canon(b)


# --------------------------------------------------------------------------
# substitution


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    candidate = base + "'"
    while candidate in avoid:
        candidate += "'"
    return candidate


def subst_term(tau: Term, x: str, replacement: Term) -> Term:
    match tau:
        case Var(name):
            return replacement if name == x else tau
        case Fun(name, args):
            return Fun(name, tuple(subst_term(a, x, replacement) for a in args))
    raise TypeError("not a term: %r" % (tau,))


def substitute(phi: Formula, x: str, tau: Term) -> Formula:
    """phi with tau for every free occurrence of x, renaming binders that
    would capture a variable of tau."""
    match phi:
        case Truth() | Falsity():
            return phi
        case RelApp(name, args):
            return RelApp(name, tuple(subst_term(a, x, tau) for a in args))
        case TermEq(l, r):
            return TermEq(subst_term(l, x, tau), subst_term(r, x, tau))
        case SpeaksFor(l, r):
            return SpeaksFor(subst_term(l, x, tau), subst_term(r, x, tau))
        case And(l, r):
            return And(substitute(l, x, tau), substitute(r, x, tau))
        case Or(l, r):
            return Or(substitute(l, x, tau), substitute(r, x, tau))
        case Implies(l, r):
            return Implies(substitute(l, x, tau), substitute(r, x, tau))
        case Not(b):
            return Not(substitute(b, x, tau))
        case Says(t, b):
            return Says(subst_term(t, x, tau), substitute(b, x, tau))
        case Forall(y, b):
            return _subst_binder(Forall, y, b, x, tau)
        case Exists(y, b):
            return _subst_binder(Exists, y, b, x, tau)
    raise TypeError("not a formula: %r" % (phi,))


def _subst_binder(ctor, y: str, body: Formula, x: str, tau: Term) -> Formula:
    if y == x or x not in free_vars(body):
        return ctor(y, body)
    if y in term_vars(tau):
        y2 = fresh_name(y, free_vars(body) | term_vars(tau) | {x})
        body = substitute(body, y, Var(y2))
        y = y2
    return ctor(y, substitute(body, x, tau))


# --------------------------------------------------------------------------
# subformulas and probe sets


def subformulas(phi: Formula) -> Iterator[Formula]:
    """phi and every formula under it, outermost first.  Bodies of binders
    come out with their bound variable free."""
    yield phi
    match phi:
        case And(l, r) | Or(l, r) | Implies(l, r):
            yield from subformulas(l)
            yield from subformulas(r)
        case Not(b) | Forall(_, b) | Exists(_, b) | Says(_, b):
            yield from subformulas(b)
        case _:
            pass


class FormulaSet:
    """Immutable, insertion-ordered set of formulas, deduplicated and
    queried up to alpha equivalence."""

    __slots__ = ("_by_key",)

    def __init__(self, items: Iterable[Formula] = ()):
        by_key: dict[tuple, Formula] = {}
        for phi in items:
            by_key.setdefault(canon(phi), phi)
        self._by_key = by_key

    def __contains__(self, phi: Formula) -> bool:
        return canon(phi) in self._by_key

    def __iter__(self) -> Iterator[Formula]:
        return iter(self._by_key.values())

    def __len__(self) -> int:
        return len(self._by_key)

    def __bool__(self) -> bool:
        return bool(self._by_key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormulaSet):
            return NotImplemented
        return set(self._by_key) == set(other._by_key)

    def __hash__(self) -> int:
        return hash(frozenset(self._by_key))

    def __repr__(self) -> str:
        return "FormulaSet({%s})" % ", ".join(print_formula(f) for f in self)

    def key(self) -> frozenset:
        return frozenset(self._by_key)

    def add(self, phi: Formula) -> "FormulaSet":
        if phi in self:
            return self
        out = FormulaSet.__new__(FormulaSet)
        d = dict(self._by_key)
        d[canon(phi)] = phi
        out._by_key = d
        return out

    def union(self, items: Iterable[Formula]) -> "FormulaSet":
        out = dict(self._by_key)
        for phi in items:
            out.setdefault(canon(phi), phi)
        res = FormulaSet.__new__(FormulaSet)
        res._by_key = out
        return res

    def discard(self, phi: Formula) -> "FormulaSet":
        k = canon(phi)
        if k not in self._by_key:
            return self
        out = FormulaSet.__new__(FormulaSet)
        out._by_key = {kk: v for kk, v in self._by_key.items() if kk != k}
        return out

    def free_vars(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for phi in self:
            out |= free_vars(phi)
        return out


Context = FormulaSet


def principal_name_terms(sig: Signature) -> tuple[Fun, ...]:
    return tuple(Fun(n) for n in sorted(sig.principals))


def probe_closure(seed: Iterable[Formula], sig: Signature, says_depth: int = 0) -> FormulaSet:
    """Smallest alpha-set containing seed, closed under subformulas, plus
    `n says phi` for every member phi and principal name n, with up to
    says_depth layers of added prefixes."""
    base: list[Formula] = []
    for phi in seed:
        base.extend(subformulas(phi))
    out = FormulaSet(base)
    names = principal_name_terms(sig)
    layer = list(out)
    for _ in range(says_depth):
        next_layer = [Says(n, phi) for phi in layer for n in names]
        out = out.union(next_layer)
        layer = next_layer
    return out


# --------------------------------------------------------------------------
# printing

_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


def print_term(tau: Term) -> str:
    return str(tau)


def print_formula(phi: Formula) -> str:
    """Render phi with the fewest parentheses that reparse to the same tree."""
    return _pf(phi, 0, True)


def _pf(phi: Formula, ctx_prec: int, rightmost: bool) -> str:
    match phi:
        case Truth():
            return "true"
        case Falsity():
            return "false"
        case RelApp(name, args):
            if not args:
                return name
            return "%s(%s)" % (name, ", ".join(str(a) for a in args))
        case TermEq(l, r):
            return "%s = %s" % (l, r)
        case SpeaksFor(l, r):
            return "%s speaksfor %s" % (l, r)
        case Implies(l, r):
            needed = ctx_prec > _PREC_IMP
            s = "%s -> %s" % (_pf(l, _PREC_OR, False),
                              _pf(r, _PREC_IMP, needed or rightmost))
            return _wrap(s, needed)
        case Or(l, r):
            needed = ctx_prec > _PREC_OR
            s = "%s \\/ %s" % (_pf(l, _PREC_OR, False),
                               _pf(r, _PREC_AND, needed or rightmost))
            return _wrap(s, needed)
        case And(l, r):
            needed = ctx_prec > _PREC_AND
            s = "%s /\\ %s" % (_pf(l, _PREC_AND, False),
                               _pf(r, _PREC_UNARY, needed or rightmost))
            return _wrap(s, needed)
        case Not(b):
            return "!" + _pf(b, _PREC_UNARY, rightmost)
        case Says(t, b):
            return "%s says %s" % (t, _pf(b, _PREC_UNARY, rightmost))
        case Forall(x, b):
            s = "forall %s. %s" % (x, _pf(b, 0, True))
            return s if rightmost else "(" + s + ")"
        case Exists(x, b):
            s = "exists %s. %s" % (x, _pf(b, 0, True))
            return s if rightmost else "(" + s + ")"
    raise TypeError("not a formula: %r" % (phi,))


def _wrap(s: str, needed: bool) -> str:
    return "(" + s + ")" if needed else s


# --------------------------------------------------------------------------
# parsing


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("%d:%d: %s" % (line, col, message))
        self.message = message
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<arrow>->)
      | (?P<conj>/\\)
      | (?P<disj>\\/)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<punct>[(),.!=])
    """,
    re.VERBOSE,
)

_KEYWORDS = frozenset(("true", "false", "says", "speaksfor", "forall", "exists"))


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident', 'kw', '->', '/\\', '\\/', '(', ')', ',', '.', '!', '=', 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], line, col)
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind == "ident":
            tok_kind = "kw" if lexeme in _KEYWORDS else "ident"
            toks.append(_Token(tok_kind, lexeme, line, col))
        elif kind == "arrow":
            toks.append(_Token("->", lexeme, line, col))
        elif kind == "conj":
            toks.append(_Token("/\\", lexeme, line, col))
        elif kind == "disj":
            toks.append(_Token("\\/", lexeme, line, col))
        elif kind == "punct":
            toks.append(_Token(lexeme, lexeme, line, col))
        # whitespace/comments advance position only
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    toks.append(_Token("eof", "", line, col))
    return toks


class _InferredSig:
    """Grows a signature while parsing.  Bare identifiers become principal
    names when they speak or delegate, variables elsewhere; applied
    identifiers become relations in formula position and functions in term
    position."""

    def __init__(self):
        self.functions: dict[str, int] = {}
        self.relations: dict[str, int] = {}
        self.principals: set[str] = set()

    def freeze(self) -> Signature:
        return Signature(dict(self.functions), dict(self.relations),
                         frozenset(self.principals))


class _Parser:
    def __init__(self, toks: list[_Token], sig: Signature | None,
                 infer: _InferredSig | None = None):
        self.toks = toks
        self.pos = 0
        self.sig = sig
        self.infer = infer
        self.bound: list[str] = []

    # -- token plumbing

    def peek(self, ahead: int = 0) -> _Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, kind: str) -> _Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError("expected %r, found %r" % (kind, t.text or "end of input"),
                             t.line, t.col)
        return self.next()

    def fail(self, message: str) -> ParseError:
        t = self.peek()
        return ParseError(message, t.line, t.col)

    # -- symbol classification

    def is_relation(self, name: str) -> bool:
        if name in self.bound:
            return False
        if self.sig is not None:
            return name in self.sig.relations
        return name in self.infer.relations

    def is_function(self, name: str) -> bool:
        if name in self.bound:
            return False
        if self.sig is not None:
            return name in self.sig.functions
        return name in self.infer.functions

    def relation_arity(self, name: str) -> int:
        return (self.sig.relations if self.sig is not None
                else self.infer.relations)[name]

    def function_arity(self, name: str) -> int:
        return (self.sig.functions if self.sig is not None
                else self.infer.functions)[name]

    # -- grammar

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.next()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek().kind == "\\/":
            self.next()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "/\\":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "!":
            self.next()
            return Not(self.unary())
        if t.kind == "kw" and t.text in ("forall", "exists"):
            self.next()
            var = self.expect("ident").text
            if self.sig is not None and (var in self.sig.functions
                                         or var in self.sig.relations):
                raise ParseError("cannot bind %r: it names a declared symbol" % var,
                                 t.line, t.col)
            self.expect(".")
            self.bound.append(var)
            try:
                body = self.formula()
            finally:
                self.bound.pop()
            return Forall(var, body) if t.text == "forall" else Exists(var, body)
        if t.kind == "kw" and t.text == "true":
            self.next()
            return TRUE
        if t.kind == "kw" and t.text == "false":
            self.next()
            return FALSE
        if t.kind == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if t.kind == "ident":
            return self.ident_led()
        raise self.fail("expected a formula, found %r" % (t.text or "end of input"))

    def ident_led(self) -> Formula:
        t = self.peek()
        name = t.text
        if self.sig is not None:
            if self.is_relation(name):
                return self.relation_app()
            tau = self.term()
            return self.after_term(tau)
        # inference mode: decide by what follows the identifier
        if name in self.bound:
            tau = self.term()
            return self.after_term(tau)
        return self._ident_led_infer()

    def _skip_args(self, start: int) -> int:
        """Index offset just past a balanced (...) group starting at offset
        start (which must point at '(')."""
        depth = 0
        i = start
        while True:
            k = self.peek(i).kind
            if k == "eof":
                t = self.peek(i)
                raise ParseError("unbalanced parentheses in argument list", t.line, t.col)
            if k == "(":
                depth += 1
            elif k == ")":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1

    def _ident_led_infer(self) -> Formula:
        t = self.peek()
        name = t.text
        if self.peek(1).kind == "(":
            after = self._skip_args(1)
            follow = self.peek(after)
            term_led = (follow.kind == "=" or
                        (follow.kind == "kw" and follow.text in ("says", "speaksfor")))
            known_fun = name in self.infer.functions
            known_rel = name in self.infer.relations
            if known_fun or (term_led and not known_rel):
                tau = self.term()
                return self.after_term(tau)
            return self.relation_app()
        follow = self.peek(1)
        term_led = (follow.kind == "=" or
                    (follow.kind == "kw" and follow.text in ("says", "speaksfor")))
        if name in self.infer.functions or (term_led and name not in self.infer.relations):
            tau = self.term()
            return self.after_term(tau)
        # bare identifier used as a formula: nullary relation
        self.infer.relations.setdefault(name, 0)
        if self.infer.relations[name] != 0:
            raise ParseError("relation %r used with mixed arities" % name, t.line, t.col)
        self.next()
        return RelApp(name)

    def relation_app(self) -> Formula:
        t = self.next()
        name = t.text
        args: list[Term] = []
        if self.peek().kind == "(":
            self.next()
            if self.peek().kind != ")":
                args.append(self.term())
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
        if self.sig is not None:
            arity = self.relation_arity(name)
            if arity != len(args):
                raise ParseError(
                    "relation %r expects %d argument(s), got %d"
                    % (name, arity, len(args)), t.line, t.col)
        else:
            arity = self.infer.relations.setdefault(name, len(args))
            if arity != len(args):
                raise ParseError("relation %r used with mixed arities" % name,
                                 t.line, t.col)
        return RelApp(name, tuple(args))

    def after_term(self, tau: Term) -> Formula:
        t = self.peek()
        if t.kind == "kw" and t.text == "says":
            self.next()
            return Says(self._as_principal(tau), self.unary())
        if t.kind == "kw" and t.text == "speaksfor":
            self.next()
            left = self._as_principal(tau)
            return SpeaksFor(left, self.term(principal_position=True))
        if t.kind == "=":
            self.next()
            return TermEq(tau, self.term())
        raise self.fail("expected 'says', 'speaksfor' or '=' after a term")

    def _as_principal(self, tau: Term) -> Term:
        """In inference mode a bare undeclared name that speaks or delegates
        becomes a principal constant."""
        if self.infer is None:
            return tau
        if isinstance(tau, Fun) and not tau.args:
            if self.infer.functions.setdefault(tau.name, 0) == 0:
                self.infer.principals.add(tau.name)
            return tau
        if isinstance(tau, Var) and tau.name not in self.bound:
            self.infer.functions[tau.name] = 0
            self.infer.principals.add(tau.name)
            return Fun(tau.name)
        return tau

    def term(self, principal_position: bool = False) -> Term:
        t = self.expect("ident") if self.peek().kind == "ident" else None
        if t is None:
            raise self.fail("expected a term")
        name = t.text
        if self.peek().kind == "(" and (self.sig is None or self.is_function(name)):
            if self.sig is None and name in self.bound:
                raise ParseError("variable %r applied to arguments" % name, t.line, t.col)
            self.next()
            args: list[Term] = []
            if self.peek().kind != ")":
                args.append(self.term())
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
            if self.sig is not None:
                arity = self.function_arity(name)
                if arity != len(args):
                    raise ParseError(
                        "function %r expects %d argument(s), got %d"
                        % (name, arity, len(args)), t.line, t.col)
            else:
                arity = self.infer.functions.setdefault(name, len(args))
                if arity != len(args):
                    raise ParseError("function %r used with mixed arities" % name,
                                     t.line, t.col)
            return Fun(name, tuple(args))
        if self.peek().kind == "(":
            raise ParseError("unknown function symbol %r" % name, t.line, t.col)
        # bare identifier
        if name in self.bound:
            return Var(name)
        if self.sig is not None:
            if name in self.sig.relations:
                raise ParseError("relation symbol %r used as a term" % name,
                                 t.line, t.col)
            if name in self.sig.functions:
                if self.sig.functions[name] != 0:
                    raise ParseError(
                        "function %r expects %d argument(s), got 0"
                        % (name, self.sig.functions[name]), t.line, t.col)
                return Fun(name)
            return Var(name)
        if name in self.infer.relations:
            raise ParseError("relation symbol %r used as a term" % name, t.line, t.col)
        if name in self.infer.functions:
            if self.infer.functions[name] != 0:
                raise ParseError("function %r expects %d argument(s), got 0"
                                 % (name, self.infer.functions[name]), t.line, t.col)
            return Fun(name)
        if principal_position:
            self.infer.functions[name] = 0
            self.infer.principals.add(name)
            return Fun(name)
        return Var(name)


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse text against a declared signature.  Identifiers that are not
    declared symbols (and not bound) are variables."""
    p = _Parser(_tokenize(text), sig)
    phi = p.formula()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError("trailing input starting at %r" % t.text, t.line, t.col)
    return phi


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(_tokenize(text), sig)
    tau = p.term()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError("trailing input starting at %r" % t.text, t.line, t.col)
    return tau


def parse_with_inferred_signature(text: str) -> tuple[Formula, Signature]:
    """Parse text while inferring a signature from how identifiers are used:
    applied identifiers become relations (formula position) or functions
    (term position); bare identifiers that speak or delegate become
    principal names; the rest are variables."""
    infer = _InferredSig()
    p = _Parser(_tokenize(text), None, infer)
    phi = p.formula()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError("trailing input starting at %r" % t.text, t.line, t.col)
    # fix the speaker of says-atoms discovered before their declaration
    sig = infer.freeze()
    return _promote_bare_speakers(phi, sig), sig


def _promote_bare_speakers(phi: Formula, sig: Signature) -> Formula:
    """Rewrite Var(x) into Fun(x) wherever x was ultimately inferred to be a
    nullary function (a speaker seen later in the same parse)."""

    def fix_term(tau: Term, bound: frozenset[str]) -> Term:
        match tau:
            case Var(name):
                if name not in bound and sig.functions.get(name) == 0:
                    return Fun(name)
                return tau
            case Fun(name, args):
                return Fun(name, tuple(fix_term(a, bound) for a in args))
        raise TypeError

    def fix(phi: Formula, bound: frozenset[str]) -> Formula:
        match phi:
            case Truth() | Falsity():
                return phi
            case RelApp(name, args):
                return RelApp(name, tuple(fix_term(a, bound) for a in args))
            case TermEq(l, r):
                return TermEq(fix_term(l, bound), fix_term(r, bound))
            case SpeaksFor(l, r):
                return SpeaksFor(fix_term(l, bound), fix_term(r, bound))
            case And(l, r):
                return And(fix(l, bound), fix(r, bound))
            case Or(l, r):
                return Or(fix(l, bound), fix(r, bound))
            case Implies(l, r):
                return Implies(fix(l, bound), fix(r, bound))
            case Not(b):
                return Not(fix(b, bound))
            case Forall(x, b):
                return Forall(x, fix(b, bound | {x}))
            case Exists(x, b):
                return Exists(x, fix(b, bound | {x}))
            case Says(t, b):
                return Says(fix_term(t, bound), fix(b, bound))
        raise TypeError

    return fix(phi, frozenset())
