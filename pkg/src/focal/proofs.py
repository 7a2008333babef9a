"""Derivation checking for the judgment "context proves goal".

Every rule's premise sequents are recomputable from its conclusion plus the
node's args, so proof files only declare the root sequent.  expected_premises
is that single source of truth; check_step compares a node's actual premise
conclusions against it, and prove_bounded drives it backward to search for
derivations.  Context membership and sequent comparison are up to alpha
equivalence throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator

from .syntax import (
    And,
    Context,
    Exists,
    FALSE,
    Falsity,
    Forall,
    Formula,
    FormulaSet,
    Fun,
    Implies,
    Not,
    Or,
    RelApp,
    Says,
    Signature,
    SpeaksFor,
    Term,
    TermEq,
    TRUE,
    Truth,
    Var,
    alpha_equal,
    canon,
    free_vars,
    fresh_name,
    principal_name_terms,
    print_formula,
    subformulas,
    substitute,
    term_vars,
)

RULES = frozenset({
    "hyp", "weak", "true-i", "false-e",
    "and-i", "and-le", "and-re",
    "or-li", "or-ri", "or-e",
    "imp-i", "imp-e", "not-i", "not-e",
    "forall-i", "forall-e", "exists-i", "exists-e",
    "eq-r", "eq-s", "eq-t", "eq-fun", "eq-rel",
    "says-lri", "says-li", "says-ri",
    "sf-i", "sf-e", "sf-r", "sf-t",
})

# which args each rule requires; every other field must stay unset
ARG_FIELDS: dict[str, tuple[str, ...]] = {
    "weak": ("formula",),
    "and-le": ("cut",),
    "and-re": ("cut",),
    "or-e": ("cut",),
    "imp-e": ("cut",),
    "not-e": ("cut",),
    "forall-i": ("var",),
    "forall-e": ("cut", "term"),
    "exists-i": ("term",),
    "exists-e": ("cut", "var"),
    "eq-t": ("mid",),
    "eq-rel": ("cut",),
    "sf-e": ("cut",),
    "sf-t": ("mid",),
}


class RuleError(Exception):
    """A node does not instantiate its rule schema."""


@dataclass(frozen=True)
class Sequent:
    context: Context
    goal: Formula

    def key(self) -> tuple:
        return (self.context.key(), canon(self.goal))

    def __str__(self) -> str:
        hyps = ", ".join(print_formula(f) for f in self.context)
        return "%s |- %s" % (hyps, print_formula(self.goal))


def sequent_alpha_equal(a: Sequent, b: Sequent) -> bool:
    return a.key() == b.key()


@dataclass(frozen=True)
class RuleArgs:
    """Rule-specific data: cut formula for eliminations, witness term for
    quantifier rules, eigenvariable name, middle term for transitivity,
    weakened formula."""

    cut: Formula | None = None
    term: Term | None = None
    var: str | None = None
    mid: Term | None = None
    formula: Formula | None = None

    def fields_set(self) -> tuple[str, ...]:
        return tuple(name for name in ("cut", "term", "var", "mid", "formula")
                     if getattr(self, name) is not None)


EMPTY_ARGS = RuleArgs()


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Sequent
    premises: tuple["Derivation", ...] = ()
    args: RuleArgs = EMPTY_ARGS

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


def _require_args(rule: str, args: RuleArgs) -> None:
    want = ARG_FIELDS.get(rule, ())
    got = args.fields_set()
    if tuple(sorted(got)) != tuple(sorted(want)):
        raise RuleError("%s: expected args %s, got %s"
                        % (rule, list(want) or "none", list(got) or "none"))


# --------------------------------------------------------------------------
# context boxing for the says rules
#
# Each entry maps a conclusion context of shape `tau says Gamma` to the
# context of the rule's premise; None means the context is not of that
# shape.  Kept in a mutable registry so tests can stub out a single rule's
# exactness requirement and watch the suite notice.


def _unbox(ctx: Context, speaker: Term) -> Context | None:
    inner = []
    for member in ctx:
        if not (isinstance(member, Says) and member.speaker == speaker):
            return None
        inner.append(member.body)
    return FormulaSet(inner)


def _says_lri_context(ctx: Context, speaker: Term) -> Context | None:
    return _unbox(ctx, speaker)


def _says_li_context(ctx: Context, speaker: Term) -> Context | None:
    return _unbox(ctx, speaker)


def _says_ri_context(ctx: Context, speaker: Term) -> Context | None:
    return ctx if _unbox(ctx, speaker) is not None else None


SAYS_CONTEXT_RULES: dict[str, Callable[[Context, Term], Context | None]] = {
    "says-lri": _says_lri_context,
    "says-li": _says_li_context,
    "says-ri": _says_ri_context,
}


# --------------------------------------------------------------------------
# premise computation, one schema per rule


def expected_premises(rule: str, conclusion: Sequent, args: RuleArgs = EMPTY_ARGS,
                      ) -> list[Sequent]:
    """Premise sequents this rule needs for the given conclusion, or raise
    RuleError when the conclusion/args do not fit the schema.  Side
    conditions that involve only the conclusion and args (eigenvariable
    freshness, membership, reflexivity shapes) are enforced here too."""
    if rule not in RULES:
        raise RuleError("unknown rule %r" % rule)
    _require_args(rule, args)
    ctx, goal = conclusion.context, conclusion.goal
    S = lambda c, g: Sequent(c, g)

    if rule == "hyp":
        if goal not in ctx:
            raise RuleError("hyp: goal is not a hypothesis")
        return []

    if rule == "weak":
        if args.formula not in ctx:
            raise RuleError("weak: weakened formula is not in the context")
        return [S(ctx.discard(args.formula), goal)]

    if rule == "true-i":
        if not isinstance(goal, Truth):
            raise RuleError("true-i: goal is not true")
        return []

    if rule == "false-e":
        return [S(ctx, FALSE)]

    if rule == "and-i":
        if not isinstance(goal, And):
            raise RuleError("and-i: goal is not a conjunction")
        return [S(ctx, goal.left), S(ctx, goal.right)]

    if rule == "and-le":
        return [S(ctx, And(goal, args.cut))]

    if rule == "and-re":
        return [S(ctx, And(args.cut, goal))]

    if rule == "or-li":
        if not isinstance(goal, Or):
            raise RuleError("or-li: goal is not a disjunction")
        return [S(ctx, goal.left)]

    if rule == "or-ri":
        if not isinstance(goal, Or):
            raise RuleError("or-ri: goal is not a disjunction")
        return [S(ctx, goal.right)]

    if rule == "or-e":
        if not isinstance(args.cut, Or):
            raise RuleError("or-e: cut is not a disjunction")
        return [S(ctx, args.cut),
                S(ctx.add(args.cut.left), goal),
                S(ctx.add(args.cut.right), goal)]

    if rule == "imp-i":
        if not isinstance(goal, Implies):
            raise RuleError("imp-i: goal is not an implication")
        return [S(ctx.add(goal.left), goal.right)]

    if rule == "imp-e":
        return [S(ctx, args.cut), S(ctx, Implies(args.cut, goal))]

    if rule == "not-i":
        if not isinstance(goal, Not):
            raise RuleError("not-i: goal is not a negation")
        return [S(ctx.add(goal.body), FALSE)]

    if rule == "not-e":
        if not isinstance(goal, Falsity):
            raise RuleError("not-e: goal is not false")
        return [S(ctx, args.cut), S(ctx, Not(args.cut))]

    if rule == "forall-i":
        if not isinstance(goal, Forall):
            raise RuleError("forall-i: goal is not universal")
        y = args.var
        if y in ctx.free_vars():
            raise RuleError("forall-i: %r occurs free in the context" % y)
        if y in free_vars(goal):
            raise RuleError("forall-i: %r occurs free in the goal" % y)
        return [S(ctx, substitute(goal.body, goal.var, Var(y)))]

    if rule == "forall-e":
        if not isinstance(args.cut, Forall):
            raise RuleError("forall-e: cut is not universal")
        want = substitute(args.cut.body, args.cut.var, args.term)
        if not alpha_equal(goal, want):
            raise RuleError("forall-e: goal is not the cut instantiated at the term")
        return [S(ctx, args.cut)]

    if rule == "exists-i":
        if not isinstance(goal, Exists):
            raise RuleError("exists-i: goal is not existential")
        return [S(ctx, substitute(goal.body, goal.var, args.term))]

    if rule == "exists-e":
        if not isinstance(args.cut, Exists):
            raise RuleError("exists-e: cut is not existential")
        y = args.var
        if y in ctx.free_vars():
            raise RuleError("exists-e: %r occurs free in the context" % y)
        if y in free_vars(goal):
            raise RuleError("exists-e: %r occurs free in the goal" % y)
        if y in free_vars(args.cut):
            raise RuleError("exists-e: %r occurs free in the cut formula" % y)
        opened = substitute(args.cut.body, args.cut.var, Var(y))
        return [S(ctx, args.cut), S(ctx.add(opened), goal)]

    if rule == "eq-r":
        if not (isinstance(goal, TermEq) and goal.left == goal.right):
            raise RuleError("eq-r: goal is not an equality of a term with itself")
        return []

    if rule == "eq-s":
        if not isinstance(goal, TermEq):
            raise RuleError("eq-s: goal is not an equality")
        return [S(ctx, TermEq(goal.right, goal.left))]

    if rule == "eq-t":
        if not isinstance(goal, TermEq):
            raise RuleError("eq-t: goal is not an equality")
        return [S(ctx, TermEq(goal.left, args.mid)),
                S(ctx, TermEq(args.mid, goal.right))]

    if rule == "eq-fun":
        if not (isinstance(goal, TermEq)
                and isinstance(goal.left, Fun) and isinstance(goal.right, Fun)
                and goal.left.name == goal.right.name
                and len(goal.left.args) == len(goal.right.args)):
            raise RuleError("eq-fun: goal is not an equality of applications "
                            "of one function")
        return [S(ctx, TermEq(a, b))
                for a, b in zip(goal.left.args, goal.right.args)]

    if rule == "eq-rel":
        if not isinstance(goal, RelApp):
            raise RuleError("eq-rel: goal is not a relation atom")
        if not (isinstance(args.cut, RelApp) and args.cut.name == goal.name
                and len(args.cut.args) == len(goal.args)):
            raise RuleError("eq-rel: cut is not an atom of the goal's relation")
        return [S(ctx, args.cut)] + [S(ctx, TermEq(a, b))
                                     for a, b in zip(args.cut.args, goal.args)]

    if rule in ("says-lri", "says-li", "says-ri"):
        if not isinstance(goal, Says):
            raise RuleError("%s: goal is not a says formula" % rule)
        premise_ctx = SAYS_CONTEXT_RULES[rule](ctx, goal.speaker)
        if premise_ctx is None:
            raise RuleError("%s: context is not exactly the goal speaker's "
                            "says-image of a set" % rule)
        if rule == "says-lri":
            return [S(premise_ctx, goal.body)]
        if rule == "says-li":
            return [S(premise_ctx, goal)]
        return [S(premise_ctx, goal.body)]

    if rule == "sf-i":
        if not isinstance(goal, SpeaksFor):
            raise RuleError("sf-i: goal is not a speaksfor formula")
        return [S(ctx, Says(goal.right, goal))]

    if rule == "sf-e":
        if not isinstance(goal, Says):
            raise RuleError("sf-e: goal is not a says formula")
        if not isinstance(args.cut, SpeaksFor):
            raise RuleError("sf-e: cut is not a speaksfor formula")
        if args.cut.right != goal.speaker:
            raise RuleError("sf-e: cut's right term is not the goal speaker")
        return [S(ctx, args.cut), S(ctx, Says(args.cut.left, goal.body))]

    if rule == "sf-r":
        if not (isinstance(goal, SpeaksFor) and goal.left == goal.right):
            raise RuleError("sf-r: goal is not a term speaking for itself")
        return []

    if rule == "sf-t":
        if not isinstance(goal, SpeaksFor):
            raise RuleError("sf-t: goal is not a speaksfor formula")
        return [S(ctx, SpeaksFor(goal.left, args.mid)),
                S(ctx, SpeaksFor(args.mid, goal.right))]

    raise RuleError("unknown rule %r" % rule)  # pragma: no cover


# --------------------------------------------------------------------------
# node and tree checking


def _check_generic(node: Derivation) -> str | None:
    try:
        expected = expected_premises(node.rule, node.conclusion, node.args)
    except RuleError as exc:
        return str(exc)
    if len(node.premises) != len(expected):
        return ("%s: expected %d premise(s), got %d"
                % (node.rule, len(expected), len(node.premises)))
    for i, (sub, want) in enumerate(zip(node.premises, expected)):
        if not sequent_alpha_equal(sub.conclusion, want):
            return ("%s: premise %d concludes [%s], schema needs [%s]"
                    % (node.rule, i + 1, sub.conclusion, want))
    return None


def _check_weak(node: Derivation) -> str | None:
    # general form: conclusion context = premise context + weakened formula
    try:
        _require_args("weak", node.args)
    except RuleError as exc:
        return str(exc)
    if len(node.premises) != 1:
        return "weak: expected 1 premise, got %d" % len(node.premises)
    premise = node.premises[0].conclusion
    if not alpha_equal(premise.goal, node.conclusion.goal):
        return "weak: premise goal differs from conclusion goal"
    if premise.context.add(node.args.formula) != node.conclusion.context:
        return ("weak: conclusion context is not the premise context plus "
                "the weakened formula")
    return None


RULE_CHECKS: dict[str, Callable[[Derivation], str | None]] = {
    name: _check_generic for name in RULES}
RULE_CHECKS["weak"] = _check_weak


def check_step(node: Derivation) -> str | None:
    """None when the node instantiates its rule schema (premises trusted as
    given); a diagnostic naming rule and clause otherwise."""
    checker = RULE_CHECKS.get(node.rule)
    if checker is None:
        return "unknown rule %r" % node.rule
    return checker(node)


@dataclass(frozen=True)
class DerivationCheck:
    ok: bool
    path: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def where(self) -> str:
        if not self.path:
            return "root"
        return "root." + ".".join(str(i + 1) for i in self.path)


def check_derivation(root: Derivation) -> DerivationCheck:
    """Check every node; on failure report the first failing node's path
    (premise indices from the root) and diagnostic."""
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(root, ())]
    while stack:
        node, path = stack.pop()
        message = check_step(node)
        if message is not None:
            return DerivationCheck(False, path, message)
        for i in reversed(range(len(node.premises))):
            stack.append((node.premises[i], path + (i,)))
    return DerivationCheck(True)


# --------------------------------------------------------------------------
# bounded backward proof search


def _subterms(tau: Term) -> Iterator[Term]:
    yield tau
    if isinstance(tau, Fun):
        for a in tau.args:
            yield from _subterms(a)


def _formula_terms(phi: Formula) -> Iterator[Term]:
    for sub in subformulas(phi):
        match sub:
            case RelApp(_, args):
                for a in args:
                    yield from _subterms(a)
            case TermEq(left, right):
                yield from _subterms(left)
                yield from _subterms(right)
            case Says(speaker, _):
                yield from _subterms(speaker)
            case SpeaksFor(left, right):
                yield from _subterms(left)
                yield from _subterms(right)
            case _:
                pass


@dataclass
class SearchPool:
    """Cut formulas and witness terms a bounded search may draw from: the
    subformula closure of the root sequent plus the signature's constants
    and principal names."""

    formulas: tuple[Formula, ...]
    terms: tuple[Term, ...]

    @staticmethod
    def for_sequent(sequent: Sequent, sig: Signature | None = None) -> "SearchPool":
        closure: list[Formula] = []
        for phi in list(sequent.context) + [sequent.goal]:
            closure.extend(subformulas(phi))
        formulas = FormulaSet(closure)
        terms: dict[tuple, Term] = {}
        for phi in formulas:
            for t in _formula_terms(phi):
                terms.setdefault(canon_term_key(t), t)
        if sig is not None:
            for name, arity in sorted(sig.functions.items()):
                if arity == 0:
                    terms.setdefault(canon_term_key(Fun(name)), Fun(name))
        return SearchPool(tuple(formulas), tuple(terms.values()))


def canon_term_key(tau: Term) -> tuple:
    match tau:
        case Var(name):
            return ("v", name)
        case Fun(name, args):
            return ("f", name, tuple(canon_term_key(a) for a in args))
    raise TypeError("not a term: %r" % (tau,))


def prove_bounded(sequent: Sequent, depth: int, sig: Signature | None = None,
                  memo: dict | None = None) -> Derivation | None:
    """Exhaustive backward search for a derivation of height <= depth, with
    cuts and witness terms restricted to the root sequent's subformula
    closure plus signature constants.  Within those bounds the search is
    complete: a None result certifies no such derivation exists.

    Pass a shared memo dict to reuse work across related queries; it must
    not outlive changes to the rule registries.
    """
    pool = SearchPool.for_sequent(sequent, sig)
    if memo is None:
        memo = {}
    return _prove(sequent, depth, pool, memo)


def _attempts(sequent: Sequent, pool: SearchPool) -> Iterator[tuple[str, RuleArgs]]:
    """Candidate (rule, args) pairs for one backward step, cheapest first.
    expected_premises decides actual applicability."""
    ctx, goal = sequent.context, sequent.goal

    yield "hyp", EMPTY_ARGS
    match goal:
        case Truth():
            yield "true-i", EMPTY_ARGS
        case TermEq(left, right):
            if left == right:
                yield "eq-r", EMPTY_ARGS
            yield "eq-fun", EMPTY_ARGS
            yield "eq-s", EMPTY_ARGS
            for mid in pool.terms:
                if mid != left and mid != right:
                    yield "eq-t", RuleArgs(mid=mid)
        case SpeaksFor(left, right):
            if left == right:
                yield "sf-r", EMPTY_ARGS
            yield "sf-i", EMPTY_ARGS
            for mid in pool.terms:
                if mid != left and mid != right:
                    yield "sf-t", RuleArgs(mid=mid)
        case And(_, _):
            yield "and-i", EMPTY_ARGS
        case Or(_, _):
            yield "or-li", EMPTY_ARGS
            yield "or-ri", EMPTY_ARGS
        case Implies(_, _):
            yield "imp-i", EMPTY_ARGS
        case Not(_):
            yield "not-i", EMPTY_ARGS
        case Forall(x, body):
            avoid = ctx.free_vars() | free_vars(goal)
            y = x if x not in avoid else fresh_name(x, avoid)
            yield "forall-i", RuleArgs(var=y)
        case Exists(_, _):
            for t in pool.terms:
                yield "exists-i", RuleArgs(term=t)
        case Says(speaker, _):
            yield "says-ri", EMPTY_ARGS
            yield "says-lri", EMPTY_ARGS
            yield "says-li", EMPTY_ARGS
            for t in pool.terms:
                if t != speaker:
                    yield "sf-e", RuleArgs(cut=SpeaksFor(t, speaker))
        case Falsity():
            for phi in pool.formulas:
                if not isinstance(phi, Falsity):
                    yield "not-e", RuleArgs(cut=phi)
        case _:
            pass

    if isinstance(goal, RelApp):
        for phi in pool.formulas:
            if (isinstance(phi, RelApp) and phi.name == goal.name
                    and len(phi.args) == len(goal.args)
                    and not alpha_equal(phi, goal)):
                yield "eq-rel", RuleArgs(cut=phi)

    if not isinstance(goal, Falsity):
        yield "false-e", EMPTY_ARGS

    for phi in pool.formulas:
        match phi:
            case Implies(left, right):
                if alpha_equal(right, goal):
                    yield "imp-e", RuleArgs(cut=left)
            case Or(_, _):
                yield "or-e", RuleArgs(cut=phi)
            case And(left, right):
                if alpha_equal(left, goal):
                    yield "and-le", RuleArgs(cut=right)
                if alpha_equal(right, goal):
                    yield "and-re", RuleArgs(cut=left)
            case Forall(x, body):
                for t in pool.terms:
                    if alpha_equal(substitute(body, x, t), goal):
                        yield "forall-e", RuleArgs(cut=phi, term=t)
            case Exists(_, _):
                avoid = (ctx.free_vars() | free_vars(goal) | free_vars(phi))
                yield "exists-e", RuleArgs(cut=phi, var=fresh_name("y", avoid))
            case _:
                pass

    for member in ctx:
        yield "weak", RuleArgs(formula=member)


def _prove(sequent: Sequent, budget: int, pool: SearchPool,
           memo: dict) -> Derivation | None:
    if budget <= 0:
        return None
    key = (sequent.key(), budget)
    if key in memo:
        return memo[key]
    memo[key] = None  # cycle guard: a sequent cannot prove itself
    result = None
    for rule, args in _attempts(sequent, pool):
        try:
            premises = expected_premises(rule, sequent, args)
        except RuleError:
            continue
        subproofs = []
        for premise in premises:
            sub = _prove(premise, budget - 1, pool, memo)
            if sub is None:
                break
            subproofs.append(sub)
        else:
            result = Derivation(rule, sequent, tuple(subproofs), args)
            break
    memo[key] = result
    return result


# --------------------------------------------------------------------------
# random derivation generation


def random_term(rng: random.Random, sig: Signature, depth: int = 2,
                variables: tuple[str, ...] = ()) -> Term:
    constants = sorted(n for n, a in sig.functions.items() if a == 0)
    choices = ["const"] if constants else []
    if variables:
        choices.append("var")
    unary = sorted(n for n, a in sig.functions.items() if a >= 1)
    if unary and depth > 0:
        choices.append("app")
    if not choices:
        return Var("x")
    match rng.choice(choices):
        case "var":
            return Var(rng.choice(variables))
        case "app":
            name = rng.choice(unary)
            arity = sig.functions[name]
            return Fun(name, tuple(random_term(rng, sig, depth - 1, variables)
                                   for _ in range(arity)))
        case _:
            return Fun(rng.choice(constants))


def random_formula(rng: random.Random, sig: Signature, depth: int = 2,
                   variables: tuple[str, ...] = ()) -> Formula:
    atoms = ["true", "false", "eq"]
    if sig.relations:
        atoms.append("rel")
    if sig.principals:
        atoms.extend(["says-atom", "sf-atom"])
    if depth <= 0:
        kind = rng.choice(atoms)
    else:
        kind = rng.choice(atoms + ["and", "or", "imp", "not", "says",
                                   "forall", "exists"])
    term = lambda: random_term(rng, sig, 1, variables)
    sub = lambda extra=(): random_formula(rng, sig, depth - 1,
                                          variables + tuple(extra))
    match kind:
        case "true":
            return TRUE
        case "false":
            return FALSE
        case "eq":
            return TermEq(term(), term())
        case "rel":
            name = rng.choice(sorted(sig.relations))
            return RelApp(name, tuple(term() for _ in range(sig.relations[name])))
        case "says-atom" | "says":
            speaker = Fun(rng.choice(sorted(sig.principals)))
            if kind == "says":
                body = sub()
            else:
                nullary = sorted(n for n, a in sig.relations.items() if a == 0)
                body = RelApp(rng.choice(nullary)) if nullary else TRUE
            return Says(speaker, body)
        case "sf-atom":
            names = sorted(sig.principals)
            return SpeaksFor(Fun(rng.choice(names)), Fun(rng.choice(names)))
        case "and":
            return And(sub(), sub())
        case "or":
            return Or(sub(), sub())
        case "imp":
            return Implies(sub(), sub())
        case "not":
            return Not(sub())
        case "forall":
            x = "x%d" % rng.randrange(3)
            return Forall(x, sub((x,))) if x not in variables else TRUE
        case "exists":
            x = "x%d" % rng.randrange(3)
            return Exists(x, sub((x,))) if x not in variables else TRUE
    raise AssertionError(kind)


def _random_context(rng: random.Random, sig: Signature) -> Context:
    return FormulaSet(random_formula(rng, sig, 1)
                      for _ in range(rng.randrange(3)))


def _weaken(node: Derivation, phi: Formula) -> Derivation:
    conclusion = Sequent(node.conclusion.context.add(phi), node.conclusion.goal)
    return Derivation("weak", conclusion, (node,), RuleArgs(formula=phi))


def _weaken_to(node: Derivation, target: Context) -> Derivation:
    for phi in target:
        if phi not in node.conclusion.context:
            node = _weaken(node, phi)
    return node


def _principal_term(rng: random.Random, sig: Signature) -> Term | None:
    names = principal_name_terms(sig)
    return rng.choice(names) if names else None


def generate_derivation(seed: int, sig: Signature, depth: int) -> Derivation:
    """A random derivation that check_derivation accepts; identical trees
    for identical seeds.  depth bounds the recursion budget, with depth 1
    producing a single axiom node."""
    rng = random.Random(seed)
    return _gen(rng, sig, max(1, depth))


def _leaf(rng: random.Random, sig: Signature) -> Derivation:
    ctx = _random_context(rng, sig)
    kinds = ["true-i", "hyp", "eq-r", "sf-r"]
    match rng.choice(kinds):
        case "hyp":
            phi = random_formula(rng, sig, 1)
            return Derivation("hyp", Sequent(ctx.add(phi), phi))
        case "eq-r":
            t = random_term(rng, sig, 1)
            return Derivation("eq-r", Sequent(ctx, TermEq(t, t)))
        case "sf-r":
            t = _principal_term(rng, sig) or random_term(rng, sig, 1)
            return Derivation("sf-r", Sequent(ctx, SpeaksFor(t, t)))
        case _:
            return Derivation("true-i", Sequent(ctx, TRUE))


def _gen(rng: random.Random, sig: Signature, budget: int) -> Derivation:
    if budget <= 1:
        return _leaf(rng, sig)
    builders = [b for need, b in _BUILDERS if need <= budget]
    builder = rng.choice(builders)
    node = builder(rng, sig, budget)
    return node if node is not None else _leaf(rng, sig)


def _build_weak(rng, sig, budget):
    sub = _gen(rng, sig, budget - 1)
    phi = random_formula(rng, sig, 1)
    return _weaken(sub, phi) if phi not in sub.conclusion.context else sub


def _build_and_i(rng, sig, budget):
    d1 = _gen(rng, sig, budget - 1)
    d2 = _gen(rng, sig, budget - 1)
    ctx = d1.conclusion.context.union(d2.conclusion.context)
    d1, d2 = _weaken_to(d1, ctx), _weaken_to(d2, ctx)
    goal = And(d1.conclusion.goal, d2.conclusion.goal)
    return Derivation("and-i", Sequent(ctx, goal), (d1, d2))


def _build_and_le(rng, sig, budget):
    conj = _build_and_i(rng, sig, budget - 1)
    goal = conj.conclusion.goal
    return Derivation("and-le", Sequent(conj.conclusion.context, goal.left),
                      (conj,), RuleArgs(cut=goal.right))


def _build_and_re(rng, sig, budget):
    conj = _build_and_i(rng, sig, budget - 1)
    goal = conj.conclusion.goal
    return Derivation("and-re", Sequent(conj.conclusion.context, goal.right),
                      (conj,), RuleArgs(cut=goal.left))


def _build_or_intro(rng, sig, budget):
    sub = _gen(rng, sig, budget - 1)
    other = random_formula(rng, sig, 1)
    seq = sub.conclusion
    if rng.random() < 0.5:
        return Derivation("or-li", Sequent(seq.context, Or(seq.goal, other)), (sub,))
    return Derivation("or-ri", Sequent(seq.context, Or(other, seq.goal)), (sub,))


def _build_or_e(rng, sig, budget):
    left = _gen(rng, sig, budget - 2)
    seq = left.conclusion
    other = random_formula(rng, sig, 1)
    cut = Or(seq.goal, other)
    d_or = Derivation("or-li", Sequent(seq.context, cut), (left,))
    b1 = Derivation("true-i", Sequent(seq.context.add(cut.left), TRUE))
    b2 = Derivation("true-i", Sequent(seq.context.add(cut.right), TRUE))
    return Derivation("or-e", Sequent(seq.context, TRUE), (d_or, b1, b2),
                      RuleArgs(cut=cut))


def _build_imp_i(rng, sig, budget):
    sub = _gen(rng, sig, budget - 1)
    seq = sub.conclusion
    if seq.context and rng.random() < 0.7:
        phi = rng.choice(list(seq.context))
    else:
        phi = random_formula(rng, sig, 1)
        sub = _weaken(sub, phi) if phi not in seq.context else sub
        seq = sub.conclusion
    conclusion = Sequent(seq.context.discard(phi), Implies(phi, seq.goal))
    return Derivation("imp-i", conclusion, (sub,))


def _build_imp_e(rng, sig, budget):
    phi = random_formula(rng, sig, 1)
    ctx = _random_context(rng, sig).add(phi)
    d_phi = Derivation("hyp", Sequent(ctx, phi))
    inner = Derivation("hyp", Sequent(ctx.add(phi), phi))
    d_imp = Derivation("imp-i", Sequent(ctx, Implies(phi, phi)), (inner,))
    return Derivation("imp-e", Sequent(ctx, phi), (d_phi, d_imp),
                      RuleArgs(cut=phi))


def _build_not_e(rng, sig, budget):
    phi = random_formula(rng, sig, 1)
    ctx = _random_context(rng, sig).union((phi, Not(phi)))
    d1 = Derivation("hyp", Sequent(ctx, phi))
    d2 = Derivation("hyp", Sequent(ctx, Not(phi)))
    return Derivation("not-e", Sequent(ctx, FALSE), (d1, d2),
                      RuleArgs(cut=phi))


def _build_not_i(rng, sig, budget):
    d_false = _build_not_e(rng, sig, budget - 1)
    ctx = d_false.conclusion.context
    phi = rng.choice(list(ctx))
    return Derivation("not-i", Sequent(ctx.discard(phi), Not(phi)), (d_false,))


def _build_false_e(rng, sig, budget):
    d_false = _build_not_e(rng, sig, budget - 1)
    goal = random_formula(rng, sig, 1)
    return Derivation("false-e", Sequent(d_false.conclusion.context, goal),
                      (d_false,))


def _build_forall_i(rng, sig, budget):
    ctx = _random_context(rng, sig)
    x = fresh_name("x", ctx.free_vars())
    body = TermEq(Var(x), Var(x))
    premise = Derivation("eq-r", Sequent(ctx, body))
    return Derivation("forall-i", Sequent(ctx, Forall(x, body)), (premise,),
                      RuleArgs(var=x))


def _build_forall_e(rng, sig, budget):
    d_all = _build_forall_i(rng, sig, budget - 1)
    cut = d_all.conclusion.goal
    t = random_term(rng, sig, 1)
    goal = substitute(cut.body, cut.var, t)
    return Derivation("forall-e", Sequent(d_all.conclusion.context, goal),
                      (d_all,), RuleArgs(cut=cut, term=t))


def _build_exists_i(rng, sig, budget):
    sub = _gen(rng, sig, budget - 1)
    seq = sub.conclusion
    x = fresh_name("x", free_vars(seq.goal))
    goal = Exists(x, seq.goal)  # vacuous body: any witness term fits
    return Derivation("exists-i", Sequent(seq.context, goal), (sub,),
                      RuleArgs(term=random_term(rng, sig, 1)))


def _build_exists_e(rng, sig, budget):
    d_ex = _build_exists_i(rng, sig, budget - 1)
    cut = d_ex.conclusion.goal
    ctx = d_ex.conclusion.context
    y = fresh_name("y", ctx.free_vars() | free_vars(cut))
    opened = substitute(cut.body, cut.var, Var(y))
    branch = Derivation("true-i", Sequent(ctx.add(opened), TRUE))
    return Derivation("exists-e", Sequent(ctx, TRUE), (d_ex, branch),
                      RuleArgs(cut=cut, var=y))


def _build_eq_s(rng, sig, budget):
    t1, t2 = random_term(rng, sig, 1), random_term(rng, sig, 1)
    ctx = _random_context(rng, sig).add(TermEq(t1, t2))
    premise = Derivation("hyp", Sequent(ctx, TermEq(t1, t2)))
    return Derivation("eq-s", Sequent(ctx, TermEq(t2, t1)), (premise,))


def _build_eq_t(rng, sig, budget):
    a, b, c = (random_term(rng, sig, 1) for _ in range(3))
    ctx = _random_context(rng, sig).union((TermEq(a, b), TermEq(b, c)))
    d1 = Derivation("hyp", Sequent(ctx, TermEq(a, b)))
    d2 = Derivation("hyp", Sequent(ctx, TermEq(b, c)))
    return Derivation("eq-t", Sequent(ctx, TermEq(a, c)), (d1, d2),
                      RuleArgs(mid=b))


def _build_eq_fun(rng, sig, budget):
    named = sorted(sig.functions.items())
    if not named:
        return None
    name, arity = rng.choice(named)
    ctx = _random_context(rng, sig)
    args = tuple(random_term(rng, sig, 0) for _ in range(arity))
    goal = TermEq(Fun(name, args), Fun(name, args))
    premises = tuple(Derivation("eq-r", Sequent(ctx, TermEq(a, a)))
                     for a in args)
    return Derivation("eq-fun", Sequent(ctx, goal), premises)


def _build_eq_rel(rng, sig, budget):
    if not sig.relations:
        return None
    name = rng.choice(sorted(sig.relations))
    arity = sig.relations[name]
    args = tuple(random_term(rng, sig, 0) for _ in range(arity))
    atom = RelApp(name, args)
    ctx = _random_context(rng, sig).add(atom)
    premises = [Derivation("hyp", Sequent(ctx, atom))]
    premises += [Derivation("eq-r", Sequent(ctx, TermEq(a, a))) for a in args]
    return Derivation("eq-rel", Sequent(ctx, atom), tuple(premises),
                      RuleArgs(cut=atom))


def _build_says_lri(rng, sig, budget):
    speaker = _principal_term(rng, sig)
    if speaker is None:
        return None
    sub = _gen(rng, sig, budget - 1)
    seq = sub.conclusion
    boxed = FormulaSet(Says(speaker, phi) for phi in seq.context)
    return Derivation("says-lri", Sequent(boxed, Says(speaker, seq.goal)),
                      (sub,))


def _build_says_ri(rng, sig, budget):
    speaker = _principal_term(rng, sig)
    if speaker is None:
        return None
    inner = Says(speaker, random_formula(rng, sig, 1))
    ctx = FormulaSet((inner,))
    premise = Derivation("hyp", Sequent(ctx, inner))
    return Derivation("says-ri", Sequent(ctx, Says(speaker, inner)), (premise,))


def _build_says_li(rng, sig, budget):
    speaker = _principal_term(rng, sig)
    if speaker is None:
        return None
    phi = random_formula(rng, sig, 1)
    ctx = FormulaSet((Says(speaker, phi),))
    premise = Derivation("hyp", Sequent(ctx, Says(speaker, phi)))
    boxed = FormulaSet(Says(speaker, psi) for psi in ctx)
    return Derivation("says-li", Sequent(boxed, Says(speaker, phi)), (premise,))


def _build_sf_i(rng, sig, budget):
    p = _principal_term(rng, sig)
    q = _principal_term(rng, sig)
    if p is None or q is None:
        return None
    goal = SpeaksFor(p, q)
    hypothesis = Says(q, goal)
    ctx = _random_context(rng, sig).add(hypothesis)
    premise = Derivation("hyp", Sequent(ctx, hypothesis))
    return Derivation("sf-i", Sequent(ctx, goal), (premise,))


def _build_sf_e(rng, sig, budget):
    p = _principal_term(rng, sig)
    q = _principal_term(rng, sig)
    if p is None or q is None:
        return None
    phi = random_formula(rng, sig, 1)
    cut = SpeaksFor(p, q)
    ctx = _random_context(rng, sig).union((cut, Says(p, phi)))
    d1 = Derivation("hyp", Sequent(ctx, cut))
    d2 = Derivation("hyp", Sequent(ctx, Says(p, phi)))
    return Derivation("sf-e", Sequent(ctx, Says(q, phi)), (d1, d2),
                      RuleArgs(cut=cut))


def _build_sf_t(rng, sig, budget):
    p = _principal_term(rng, sig)
    q = _principal_term(rng, sig)
    r = _principal_term(rng, sig)
    if p is None:
        return None
    ctx = _random_context(rng, sig).union((SpeaksFor(p, q), SpeaksFor(q, r)))
    d1 = Derivation("hyp", Sequent(ctx, SpeaksFor(p, q)))
    d2 = Derivation("hyp", Sequent(ctx, SpeaksFor(q, r)))
    return Derivation("sf-t", Sequent(ctx, SpeaksFor(p, r)), (d1, d2),
                      RuleArgs(mid=q))


_BUILDERS: tuple[tuple[int, Callable], ...] = (
    (2, _build_weak),
    (2, _build_and_i),
    (3, _build_and_le),
    (3, _build_and_re),
    (2, _build_or_intro),
    (3, _build_or_e),
    (2, _build_imp_i),
    (2, _build_imp_e),
    (2, _build_not_e),
    (3, _build_not_i),
    (3, _build_false_e),
    (2, _build_forall_i),
    (3, _build_forall_e),
    (2, _build_exists_i),
    (3, _build_exists_e),
    (2, _build_eq_s),
    (2, _build_eq_t),
    (2, _build_eq_fun),
    (2, _build_eq_rel),
    (2, _build_says_lri),
    (2, _build_says_ri),
    (2, _build_says_li),
    (2, _build_sf_i),
    (2, _build_sf_e),
    (2, _build_sf_t),
)
