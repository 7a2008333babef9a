"""Belief semantics: worldviews, the belief evaluator, and the worldview
well-formedness conditions.

A worldview source answers "does principal p accept phi at world w under
valuation v".  Extensional sources store finite sets of closed formulas,
so their answers ignore the valuation; derived sources delegate to a modal
model and inherit its full valuation dependence.  Non-principal
individuals accept every formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .kripke import KripkeEvaluator, KripkeModel
from .models import (
    ConstructiveFrame,
    EvalError,
    Valuation,
    check_constructive_wellformed,
    interpret_term,
    principal_equality,
    principal_name_map,
    valuations_for,
)
from .proofs import Sequent, prove_bounded
from .reports import Report
from .syntax import (
    And,
    Exists,
    Falsity,
    Forall,
    Formula,
    FormulaSet,
    Implies,
    Not,
    Or,
    RelApp,
    Says,
    SpeaksFor,
    TermEq,
    Truth,
    Var,
    canon,
    free_vars,
    fresh_name,
    print_formula,
    substitute,
)

EMPTY_WORLDVIEW = FormulaSet()


@dataclass(frozen=True)
class ExtensionalWorldviews:
    """Finite worldview table keyed by (world, principal individual)."""

    table: Mapping[tuple[str, str], FormulaSet]

    def stored(self, w: str, p: str) -> FormulaSet:
        return self.table.get((w, p), EMPTY_WORLDVIEW)


@dataclass(frozen=True)
class DerivedWorldviews:
    """Worldviews read off a modal model: p accepts phi at w when the
    model validates `p-name says phi` there."""

    kripke: KripkeModel


WorldviewSource = Union[ExtensionalWorldviews, DerivedWorldviews]


@dataclass(frozen=True)
class BeliefModel:
    frame: ConstructiveFrame
    worldviews: WorldviewSource

    def __post_init__(self):
        if (isinstance(self.worldviews, DerivedWorldviews)
                and self.worldviews.kripke.frame != self.frame):
            raise ValueError("derived worldviews must share the frame")


# --------------------------------------------------------------------------
# evaluation


class BeliefEvaluator:
    """Clause-directed evaluator with memoization, mirroring the modal one.

    For derived sources, says-membership reuses one shared modal evaluator;
    the speaksfor clause over a derived source compares worldviews on the
    probe set and refuses to run without one.
    """

    def __init__(self, model: BeliefModel,
                 probes: Iterable[Formula] | None = None,
                 kripke_evaluator: KripkeEvaluator | None = None):
        self.model = model
        self.probes = None if probes is None else list(probes)
        self._cache: dict[tuple, bool] = {}
        self._names = principal_name_map(model.frame)
        if isinstance(model.worldviews, DerivedWorldviews):
            # an evaluator for the source model may be shared to pool its
            # cache with other sweeps over the same model
            if (kripke_evaluator is not None
                    and kripke_evaluator.model is model.worldviews.kripke):
                self._kripke_ev = kripke_evaluator
            else:
                self._kripke_ev = KripkeEvaluator(model.worldviews.kripke)
        else:
            self._kripke_ev = None
        self._up: dict[str, tuple[str, ...]] = {}
        self._dom: dict[str, tuple[str, ...]] = {}
        # see KripkeEvaluator._formula_info; the says table additionally
        # reuses the wrapper formulas contains() builds, pinning both halves
        # so the id keys stay valid
        self._info: dict[int, tuple[int, tuple[str, ...]]] = {}
        self._tokens: dict[tuple, int] = {}
        self._pinned: list[Formula] = []
        self._says: dict[tuple[int, int], tuple[Formula, Formula, Says]] = {}
        self._sf: dict[tuple[str, str, str], bool] = {}

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
        got = self._info.get(id(phi))
        if got is None:
            token = self._tokens.setdefault(canon(phi), len(self._tokens))
            got = (token, tuple(sorted(free_vars(phi))))
            self._info[id(phi)] = got
            self._pinned.append(phi)
        return got

    def contains(self, w: str, d: str, v: Valuation, phi: Formula) -> bool:
        """Worldview membership; everything is accepted off the principal
        set."""
        if d not in self.model.frame.principals:
            return True
        source = self.model.worldviews
        if isinstance(source, ExtensionalWorldviews):
            if free_vars(phi):
                raise EvalError(
                    "open formula %r queried against extensional worldviews"
                    % print_formula(phi))
            return phi in source.stored(w, d)
        name = self._names.get(d)
        if name is None:
            raise EvalError("principal %r has no naming constant" % d)
        key = (id(name), id(phi))
        entry = self._says.get(key)
        if entry is None:
            entry = (name, phi, Says(name, phi))
            self._says[key] = entry
        return self._kripke_ev.eval(w, v, entry[2])

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

    def _subset(self, w: str, d1: str, d2: str) -> bool:
        """Worldview inclusion at one world, with the all-formula worldview
        of non-principals at the top of the order."""
        key = (w, d1, d2)
        got = self._sf.get(key)
        if got is None:
            got = self._subset_probe(w, d1, d2)
            self._sf[key] = got
        return got

    def _subset_probe(self, w: str, d1: str, d2: str) -> bool:
        principals = self.model.frame.principals
        source = self.model.worldviews
        if isinstance(source, ExtensionalWorldviews):
            # a stored worldview is finite, so it never swallows the
            # all-formula worldview of a non-principal
            if d1 not in principals:
                return d2 not in principals
            if d2 not in principals:
                return True
            small, big = source.stored(w, d1), source.stored(w, d2)
            return all(phi in big for phi in small)
        if d2 not in principals:
            return True
        # probe the inclusion; contains() already treats non-principals as
        # accepting everything, which a compromised d2 can still absorb
        if self.probes is None:
            raise EvalError(
                "speaksfor over derived worldviews needs a probe set")
        frame = self.model.frame
        for phi in self.probes:
            # a probe is schematic: inclusion ranges over all of its
            # instances, regardless of the ambient valuation
            for inst in valuations_for(free_vars(phi), frame, w):
                if (self.contains(w, d1, inst, phi)
                        and not self.contains(w, d2, inst, phi)):
                    return False
        return True

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
                who = interpret_term(speaker, frame, w, v)
                return self.contains(w, who, v, body)
            case SpeaksFor(left, right):
                d1 = interpret_term(left, frame, w, v)
                d2 = interpret_term(right, frame, w, v)
                return all(self._subset(u, d1, d2) for u in self.up(w))
        raise EvalError("no clause for %r" % type(phi).__name__)


def worldview_contains(model: BeliefModel, w: str, d: str, v: Valuation,
                       phi: Formula) -> bool:
    return BeliefEvaluator(model).contains(w, d, v, phi)


def eval_belief(model: BeliefModel, w: str, v: Valuation, phi: Formula,
                probes: Iterable[Formula] | None = None) -> bool:
    """One-shot evaluation; build a BeliefEvaluator to amortize sweeps."""
    return BeliefEvaluator(model, probes).eval(w, v, phi)


# --------------------------------------------------------------------------
# well-formedness


def _structural(model: BeliefModel) -> Report:
    report = Report()
    source = model.worldviews
    if not isinstance(source, ExtensionalWorldviews):
        return report
    wset = set(model.frame.worlds)
    for (w, p) in sorted(source.table):
        if w not in wset:
            report.add("worldview-worlds", (w, p),
                       "worldview block names unknown world %r" % w)
        if p not in model.frame.principals:
            report.add("worldview-principals", (w, p),
                       "worldview block names non-principal %r" % p)
        for phi in source.table[(w, p)]:
            if free_vars(phi):
                report.add("worldview-closed", (w, p, print_formula(phi)),
                           "stored worldview formula has free variables")
    return report


def _membership_probes(model: BeliefModel, probes: Iterable[Formula]
                       ) -> FormulaSet:
    """Closed formulas whose membership the checks quantify over: the
    probes, plus everything stored when the source is extensional."""
    out = FormulaSet(phi for phi in probes if not free_vars(phi))
    if isinstance(model.worldviews, ExtensionalWorldviews):
        for key in sorted(model.worldviews.table):
            out = out.union(
                phi for phi in model.worldviews.table[key]
                if not free_vars(phi))
    return out


def check_belief_wellformed(model: BeliefModel, probes: Iterable[Formula],
                            proof_depth: int = 2) -> Report:
    """Check the worldview conditions over the probe set.

    Monotonicity, equality, transparency, and hand-off quantify over the
    membership probes exactly; closure is approximated by bounded proof
    search, so a reported closure violation is real but a clean pass is
    not a proof of closure.  The valuation conditions are exact for
    extensional sources (closed formulas ignore valuations) and probed
    for derived ones.
    """
    report = Report()
    report.merge(_structural(model))
    report.merge(check_constructive_wellformed(model.frame))
    frame = model.frame
    probes = list(probes)
    ev = BeliefEvaluator(model, probes)
    closed = _membership_probes(model, probes)
    # transparency wraps its subjects in one more says layer, so it ranges
    # over the probes alone; a stored set would otherwise demand its own
    # says-closure at ever-increasing depth
    probes_closed = FormulaSet(phi for phi in probes if not free_vars(phi))
    names = principal_name_map(frame)
    principals = sorted(frame.principals)
    nameless = [p for p in principals if p not in names]
    if nameless:
        report.note("principals without naming constants are skipped by the "
                    "transparency and hand-off checks: %s"
                    % ", ".join(nameless))

    _check_monotonicity(model, ev, closed, report)
    _check_equality(model, ev, closed, report)
    _check_valuations(model, ev, probes, report)
    _check_closure(model, ev, closed, proof_depth, report)
    _check_transparency(model, ev, probes_closed, names, report)
    _check_hand_off(model, ev, closed, names, report)
    if isinstance(model.worldviews, DerivedWorldviews):
        _check_hand_off_converse(model, ev, probes, names, report)
    return report


def _check_monotonicity(model: BeliefModel, ev: BeliefEvaluator,
                        closed: FormulaSet, report: Report) -> None:
    frame = model.frame
    for (a, b) in sorted(frame.leq):
        if a == b:
            continue
        for p in sorted(frame.principals):
            for phi in closed:
                if ev.contains(a, p, {}, phi) and not ev.contains(b, p, {}, phi):
                    report.add("worldview-monotonicity",
                               (p, a, b, print_formula(phi)),
                               "%s accepts %s at %r but not later at %r"
                               % (p, print_formula(phi), a, b))


def _check_equality(model: BeliefModel, ev: BeliefEvaluator,
                    closed: FormulaSet, report: Report) -> None:
    blocks = principal_equality(model.frame)
    for p in sorted(model.frame.principals):
        for q in sorted(blocks.get(p, frozenset())):
            if q <= p:
                continue
            for w in model.frame.worlds:
                for phi in closed:
                    if ev.contains(w, p, {}, phi) != ev.contains(w, q, {}, phi):
                        report.add("worldview-equality",
                                   (p, q, w, print_formula(phi)),
                                   "%s and %s are equal everywhere but "
                                   "disagree on %s at %r"
                                   % (p, q, print_formula(phi), w))


def _check_valuations(model: BeliefModel, ev: BeliefEvaluator,
                      probes: Iterable[Formula], report: Report) -> None:
    if isinstance(model.worldviews, ExtensionalWorldviews):
        report.note("valuation conditions hold by construction for "
                    "extensional worldviews (closed formulas only)")
        return
    frame = model.frame
    for phi in probes:
        fv = free_vars(phi)
        avoid = (fv | set(frame.signature.functions)
                 | set(frame.signature.relations))
        spare = fresh_name("x", avoid)
        for w in frame.worlds:
            domain = sorted(frame.interp_at(w).domain)
            for p in sorted(frame.principals):
                for v in valuations_for(fv, frame, w):
                    # an unused variable must not matter
                    base = ev.contains(w, p, v, phi)
                    if any(ev.contains(w, p, {**v, spare: d}, phi) != base
                           for d in domain):
                        report.add("worldview-valuations(1)",
                                   (p, w, print_formula(phi), spare),
                                   "membership of %s changes with an unused "
                                   "variable at %r" % (print_formula(phi), w))
                if not fv:
                    continue
                x = sorted(fv)[0]
                renamed = substitute(phi, x, Var(spare))
                rest = fv - {x}
                for v0 in valuations_for(rest, frame, w):
                    for d in domain:
                        lhs = ev.contains(w, p, {**v0, x: d}, phi)
                        rhs = ev.contains(w, p, {**v0, spare: d}, renamed)
                        if lhs != rhs:
                            report.add(
                                "worldview-valuations(2)",
                                (p, w, print_formula(phi), x, spare, d),
                                "renaming %s to %s changes membership of %s "
                                "at %r" % (x, spare, print_formula(phi), w))


def _check_closure(model: BeliefModel, ev: BeliefEvaluator,
                   closed: FormulaSet, proof_depth: int,
                   report: Report) -> None:
    report.note("closure check is approximate: bounded proof search to "
                "depth %d over the probe set" % proof_depth)
    frame = model.frame
    memo: dict = {}
    for w in frame.worlds:
        for p in sorted(frame.principals):
            believed = FormulaSet(phi for phi in closed
                                  if ev.contains(w, p, {}, phi))
            for phi in closed:
                if phi in believed:
                    continue
                found = prove_bounded(Sequent(believed, phi), proof_depth,
                                      frame.signature, memo)
                if found is not None:
                    report.add("worldview-closure",
                               (p, w, print_formula(phi)),
                               "%s's worldview at %r proves %s (height %d "
                               "search) but does not contain it"
                               % (p, w, print_formula(phi), proof_depth))


def _check_transparency(model: BeliefModel, ev: BeliefEvaluator,
                        probes_closed: FormulaSet,
                        names: Mapping[str, Formula],
                        report: Report) -> None:
    for w in model.frame.worlds:
        for p in sorted(model.frame.principals):
            name = names.get(p)
            if name is None:
                continue
            for phi in probes_closed:
                plain = ev.contains(w, p, {}, phi)
                boxed = ev.contains(w, p, {}, Says(name, phi))
                if plain != boxed:
                    report.add(
                        "says-transparency",
                        (p, w, print_formula(phi), plain, boxed),
                        "%s at %r accepts %s=%s but %s=%s"
                        % (p, w, print_formula(phi), plain,
                           print_formula(Says(name, phi)), boxed))


def _check_hand_off(model: BeliefModel, ev: BeliefEvaluator,
                    closed: FormulaSet, names: Mapping[str, Formula],
                    report: Report) -> None:
    for w in model.frame.worlds:
        for p in sorted(model.frame.principals):
            for q in sorted(model.frame.principals):
                if p == q or p not in names or q not in names:
                    continue
                claim = SpeaksFor(names[p], names[q])
                if not ev.contains(w, q, {}, claim):
                    continue
                for phi in closed:
                    if (ev.contains(w, p, {}, phi)
                            and not ev.contains(w, q, {}, phi)):
                        report.add(
                            "belief-hand-off",
                            (p, q, w, print_formula(phi)),
                            "%s accepts that %s speaks for it at %r yet "
                            "lacks %s, which %s accepts"
                            % (q, p, w, print_formula(phi), p))


def _check_hand_off_converse(model: BeliefModel, ev: BeliefEvaluator,
                             probes: list[Formula],
                             names: Mapping[str, Formula],
                             report: Report) -> None:
    """Require the delegation claim wherever probe-level inclusion holds.

    Worldviews read off an accessibility structure make the claim's
    membership and the worldview inclusion two views of the same relation,
    so they must agree; they can drift apart only on inputs whose
    accessibility relations the frame checks reject.  Extensional sources
    are free to omit the claim, so this runs for derived sources only.
    The inclusion quantifies over probe instances, every valuation of each
    probe's free variables, matching the sampling the frame-side speaksfor
    agreement check uses; a principal that vacuously accepts everything is
    otherwise included in nobody once an always-false instance exists.
    The result is still approximate: a reported mismatch is judged against
    exactly those instances.
    """
    frame = model.frame
    for w in frame.worlds:
        for p in sorted(frame.principals):
            for q in sorted(frame.principals):
                if p == q or p not in names or q not in names:
                    continue
                included = all(
                    not ev.contains(w, p, v, phi) or ev.contains(w, q, v, phi)
                    for phi in probes
                    for v in valuations_for(free_vars(phi), frame, w))
                if not included:
                    continue
                claim = SpeaksFor(names[p], names[q])
                if not ev.contains(w, q, {}, claim):
                    report.add(
                        "belief-hand-off-converse",
                        (p, q, w),
                        "every probe %s accepts at %r is accepted by %s, "
                        "yet %s does not accept %s"
                        % (p, w, q, q, print_formula(claim)))
