"""Modal semantics: per-principal accessibility over a constructive frame.

A modal model pairs a frame with one accessibility relation per principal.
Those relations obey no ordering laws of their own; instead a family of
frame conditions ties them to the partial order, and the structure maps
must grow along them just as they grow along leq.  The conditions live in
a registry so that the well-formedness report, the model enumerator, and
the mutation tests all consult the same checks.

Individuals outside the principal set get the empty accessibility relation:
they say everything, and anything speaks for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .models import (
    ConstructiveFrame,
    EvalError,
    Valuation,
    check_constructive_wellformed,
    check_growth_edge,
    interpret_term,
    principal_equality,
    valuations_for,
)
from .reports import Report
from .syntax import (
    And,
    Exists,
    Falsity,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    RelApp,
    Says,
    SpeaksFor,
    TermEq,
    Truth,
    canon,
    free_vars,
    principal_name_terms,
    print_formula,
    print_term,
)

Pairs = frozenset[tuple[str, str]]

EMPTY_PAIRS: Pairs = frozenset()


@dataclass(frozen=True)
class KripkeModel:
    """A constructive frame plus accessibility relations keyed by principal."""

    frame: ConstructiveFrame
    accessibility: Mapping[str, Pairs]

    def acc(self, individual: str) -> Pairs:
        """Accessibility of an individual; empty off the principal set."""
        return self.accessibility.get(individual, EMPTY_PAIRS)


# --------------------------------------------------------------------------
# restricted accessibility


def _forward_reach(adjacency: Mapping[str, set[str]], start: str) -> set[str]:
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def connected_worlds(model: KripkeModel, p: str, w: str) -> frozenset[str]:
    """Worlds reachable from w, or from which w is reachable, stepping
    through leq and p's accessibility in any combination."""
    adjacency: dict[str, set[str]] = {}
    for (a, b) in model.frame.leq:
        adjacency.setdefault(a, set()).add(b)
    for (a, b) in model.acc(p):
        adjacency.setdefault(a, set()).add(b)
    forward = _forward_reach(adjacency, w)
    return frozenset(u for u in model.frame.worlds
                     if u in forward or w in _forward_reach(adjacency, u))


def restricted_accessibility(model: KripkeModel, p: str, w: str) -> Pairs:
    """The accessibility of p cut down to the worlds connected to w.

    Only pairs with both endpoints inside connected_worlds(model, p, w)
    survive.  This is the relation the speaksfor clause and condition H
    compare."""
    component = connected_worlds(model, p, w)
    return frozenset((a, b) for (a, b) in model.acc(p)
                     if a in component and b in component)


# --------------------------------------------------------------------------
# evaluation


class KripkeEvaluator:
    """Clause-directed evaluator with memoization across queries.

    One instance per immutable model; results are cached by world, formula
    identity up to alpha, and the valuation restricted to free variables,
    so sweeps over many formulas and worlds share work.
    """

    def __init__(self, model: KripkeModel):
        self.model = model
        self._cache: dict[tuple, bool] = {}
        self._theta: dict[tuple[str, str], Pairs] = {}
        self._succ: dict[str, dict[str, tuple[str, ...]]] = {}
        # formula info keyed by object id; _pinned keeps every seen formula
        # alive so an id is never reused while its entry exists
        self._info: dict[int, tuple[int, tuple[str, ...]]] = {}
        self._tokens: dict[tuple, int] = {}
        self._pinned: list[Formula] = []
        self._up: dict[str, tuple[str, ...]] = {}
        self._dom: dict[str, tuple[str, ...]] = {}

    def up(self, w: str) -> tuple[str, ...]:
        got = self._up.get(w)
        if got is None:
            got = self.model.frame.up(w)
            self._up[w] = got
        return got

    def dom(self, w: str) -> tuple[str, ...]:
        got = self._dom.get(w)
        if got is None:
            got = tuple(sorted(self.model.frame.interp_at(w).domain))
            self._dom[w] = got
        return got

    def _formula_info(self, phi: Formula) -> tuple[int, tuple[str, ...]]:
        """A dense token for the alpha-class of phi plus its sorted free
        variables; cache keys built from these avoid rehashing trees."""
        got = self._info.get(id(phi))
        if got is None:
            token = self._tokens.setdefault(canon(phi), len(self._tokens))
            got = (token, tuple(sorted(free_vars(phi))))
            self._info[id(phi)] = got
            self._pinned.append(phi)
        return got

    def theta(self, p: str, w: str) -> Pairs:
        key = (p, w)
        got = self._theta.get(key)
        if got is None:
            got = restricted_accessibility(self.model, p, w)
            self._theta[key] = got
        return got

    def successors(self, p: str) -> Mapping[str, tuple[str, ...]]:
        got = self._succ.get(p)
        if got is None:
            grouped: dict[str, list[str]] = {}
            for (a, b) in sorted(self.model.acc(p)):
                grouped.setdefault(a, []).append(b)
            got = {a: tuple(bs) for a, bs in grouped.items()}
            self._succ[p] = got
        return got

    def eval(self, w: str, v: Valuation, phi: Formula) -> bool:
        frame = self.model.frame
        token, fv = self._formula_info(phi)
        if fv:
            domain = frame.interp_at(w).domain
            for x in fv:
                if x not in v:
                    raise EvalError("unbound variable %r" % x)
                if v[x] not in domain:
                    raise EvalError(
                        "valuation sends %r to %r, outside the domain at %r"
                        % (x, v[x], w))
            key = (w, token, tuple(v[x] for x in fv))
        else:
            key = (w, token)
        got = self._cache.get(key)
        if got is None:
            got = self._clause(w, v, phi)
            self._cache[key] = got
        return got

    def _clause(self, w: str, v: Valuation, phi: Formula) -> bool:
        frame = self.model.frame
        match phi:
            case Truth():
                return True
            case Falsity():
                return False
            case RelApp(name, args):
                values = tuple(interpret_term(t, frame, w, v) for t in args)
                return frame.interp_at(w).rel_holds(name, values)
            case TermEq(left, right):
                interp = frame.interp_at(w)
                return interp.equal(interpret_term(left, frame, w, v),
                                    interpret_term(right, frame, w, v))
            case And(left, right):
                return self.eval(w, v, left) and self.eval(w, v, right)
            case Or(left, right):
                return self.eval(w, v, left) or self.eval(w, v, right)
            case Implies(left, right):
                return all(not self.eval(u, v, left) or self.eval(u, v, right)
                           for u in self.up(w))
            case Not(body):
                return all(not self.eval(u, v, body) for u in self.up(w))
            case Forall(x, body):
                for u in self.up(w):
                    for d in self.dom(u):
                        if not self.eval(u, {**v, x: d}, body):
                            return False
                return True
            case Exists(x, body):
                return any(self.eval(w, {**v, x: d}, body)
                           for d in self.dom(w))
            case Says(speaker, body):
                # the speaker term is re-read at every later world, so a
                # drifting name can change whose relation is followed
                for u in self.up(w):
                    who = interpret_term(speaker, frame, u, v)
                    for target in self.successors(who).get(u, ()):
                        if not self.eval(target, v, body):
                            return False
                return True
            case SpeaksFor(left, right):
                p1 = interpret_term(left, frame, w, v)
                p2 = interpret_term(right, frame, w, v)
                return self.theta(p1, w) >= self.theta(p2, w)
        raise EvalError("no clause for %r" % type(phi).__name__)


def eval_kripke(model: KripkeModel, w: str, v: Valuation, phi: Formula) -> bool:
    """One-shot evaluation; build a KripkeEvaluator to amortize sweeps."""
    return KripkeEvaluator(model).eval(w, v, phi)


# --------------------------------------------------------------------------
# frame conditions


def check_it(model: KripkeModel) -> Report:
    """Two accessibility steps must factor as one leq step then one
    accessibility step."""
    report = Report()
    frame = model.frame
    for p in sorted(frame.principals):
        rel = model.acc(p)
        succ: dict[str, set[str]] = {}
        for (a, b) in rel:
            succ.setdefault(a, set()).add(b)
        for (w, u) in sorted(rel):
            for x in sorted(succ.get(u, ())):
                ok = any((w, w2) in frame.leq and (w2, x) in rel
                         for w2 in frame.worlds)
                if not ok:
                    report.add("IT", (p, w, u, x),
                               "%s: %r -> %r -> %r has no leq-then-access "
                               "factoring from %r to %r" % (p, w, u, x, w, x))
    return report


def check_id(model: KripkeModel) -> Report:
    """Every accessibility step must factor as one leq step then two
    accessibility steps."""
    report = Report()
    frame = model.frame
    for p in sorted(frame.principals):
        rel = model.acc(p)
        for (w, x) in sorted(rel):
            ok = any((w, w2) in frame.leq and (w2, u) in rel and (u, x) in rel
                     for w2 in frame.worlds for u in frame.worlds)
            if not ok:
                report.add("ID", (p, w, x),
                           "%s: %r -> %r cannot be split into a leq step "
                           "and two access steps" % (p, w, x))
    return report


def check_f2(model: KripkeModel) -> Report:
    """An accessibility step followed by a leq step must be matched by a
    leq step followed by an accessibility step."""
    report = Report()
    frame = model.frame
    for p in sorted(frame.principals):
        rel = model.acc(p)
        for (w, x) in sorted(rel):
            for (x0, x2) in sorted(frame.leq):
                if x0 != x:
                    continue
                ok = any((w, w2) in frame.leq and (w2, x2) in rel
                         for w2 in frame.worlds)
                if not ok:
                    report.add("F2", (p, w, x, x2),
                               "%s: %r -> %r then %r <= %r has no matching "
                               "leq-then-access path" % (p, w, x, x, x2))
    return report


def is_compromised(model: KripkeModel, p: str, w: str) -> bool:
    """No leq step followed by an accessibility step leaves w."""
    rel = model.acc(p)
    return not any((w, w2) in model.frame.leq and (w2, u) in rel
                   for w2 in model.frame.worlds for u in model.frame.worlds)


def check_h(model: KripkeModel) -> Report:
    """A principal with no say at w must have a restricted accessibility
    below everyone else's there; then anything it says is believed and
    everyone speaks for it."""
    report = Report()
    frame = model.frame
    principals = sorted(frame.principals)
    for p in principals:
        for w in frame.worlds:
            if not is_compromised(model, p, w):
                continue
            mine = restricted_accessibility(model, p, w)
            for q in principals:
                if q == p:
                    continue
                theirs = restricted_accessibility(model, q, w)
                extra = mine - theirs
                if extra:
                    pair = min(extra)
                    report.add("H", (p, w, q, pair),
                               "%s is compromised at %r but its restricted "
                               "accessibility keeps %r, which %s lacks"
                               % (p, w, pair, q))
    return report


def check_accessibility_equality(model: KripkeModel) -> Report:
    """Principals equal at every world must share one accessibility."""
    report = Report()
    blocks = principal_equality(model.frame)
    for p in sorted(model.frame.principals):
        for q in sorted(blocks.get(p, frozenset())):
            if q <= p:
                continue
            if model.acc(p) != model.acc(q):
                diff = model.acc(p) ^ model.acc(q)
                report.add("accessibility-equality",
                           (p, q, tuple(sorted(diff))),
                           "%s and %s are equal at every world but their "
                           "accessibility relations differ" % (p, q))
    return report


def check_accessibility_growth(model: KripkeModel) -> Report:
    """Structure maps must grow along accessibility edges too."""
    report = Report()
    frame = model.frame
    for p in sorted(model.accessibility):
        for (a, b) in sorted(model.acc(p)):
            if a != b and a in frame.interp and b in frame.interp:
                report.merge(check_growth_edge(frame, a, b, "acc:%s" % p))
    return report


# Patch point: the enumerator and the well-formedness report both walk this
# registry, so replacing an entry changes every consumer at once.
FRAME_CONDITION_CHECKS: dict[str, Callable[[KripkeModel], Report]] = {
    "IT": check_it,
    "ID": check_id,
    "F2": check_f2,
    "H": check_h,
    "accessibility-equality": check_accessibility_equality,
    "s-monotone-acc": check_accessibility_growth,
}


def _check_structural(model: KripkeModel) -> Report:
    report = Report()
    frame = model.frame
    wset = set(frame.worlds)
    for key in sorted(model.accessibility):
        if key not in frame.principals:
            report.add("accessibility-principals", (key,),
                       "accessibility declared for non-principal %r" % key)
        for (a, b) in sorted(model.accessibility[key]):
            if a not in wset or b not in wset:
                report.add("accessibility-worlds", (key, a, b),
                           "accessibility of %s mentions unknown world" % key)
    return report


def check_kripke_wellformed(model: KripkeModel,
                            probes: Iterable[Formula] | None = None) -> Report:
    """Full well-formedness: structural sanity, the constructive frame
    checks, every registered frame condition, and (when probes are given)
    the says-subsumption reading of speaksfor."""
    report = Report()
    report.merge(_check_structural(model))
    report.merge(check_constructive_wellformed(model.frame))
    for check in FRAME_CONDITION_CHECKS.values():
        report.merge(check(model))
    if probes is None:
        report.note("speaksfor-vs-says agreement not checked: no probes")
    else:
        report.merge(check_wsf_probe(model, probes))
    return report


def check_wsf_probe(model: KripkeModel, probes: Iterable[Formula]) -> Report:
    """Compare the speaksfor clause with says-subsumption over the probes.

    Subsumption across every probe without speaksfor is a "WSF" violation.
    The converse direction can only break when a structure map moves a
    principal name between worlds; it is flagged separately as
    "WSF-superset-direction" because on models whose names stay put it is
    a consequence of the restricted-accessibility definition.
    """
    report = Report()
    frame = model.frame
    probe_list = list(probes)
    if not probe_list:
        report.note("empty probe set: speaksfor-vs-says agreement not examined")
        return report
    ev = KripkeEvaluator(model)
    names = principal_name_terms(frame.signature)
    for w in frame.worlds:
        for t1 in names:
            for t2 in names:
                sf = ev.eval(w, {}, SpeaksFor(t1, t2))
                failing = None
                for phi in probe_list:
                    for v in valuations_for(free_vars(phi), frame, w):
                        if (ev.eval(w, v, Says(t1, phi))
                                and not ev.eval(w, v, Says(t2, phi))):
                            failing = (phi, v)
                            break
                    if failing:
                        break
                if failing is None and not sf:
                    report.add("WSF", (w, print_term(t1), print_term(t2)),
                               "at %r everything %s says, %s says, yet "
                               "%s speaksfor %s is false"
                               % (w, print_term(t1), print_term(t2),
                                  print_term(t1), print_term(t2)))
                elif failing is not None and sf:
                    phi, v = failing
                    report.add("WSF-superset-direction",
                               (w, print_term(t1), print_term(t2),
                                print_formula(phi), tuple(sorted(v.items()))),
                               "at %r %s speaksfor %s holds but %s says %s "
                               "and %s does not"
                               % (w, print_term(t1), print_term(t2),
                                  print_term(t1), print_formula(phi),
                                  print_term(t2)))
    return report
