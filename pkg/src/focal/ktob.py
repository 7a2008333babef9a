"""Turning an accessibility-based model into a belief model.

The transformation reads each principal's worldview off the modal model:
a formula belongs to the worldview exactly when the principal says it
there.  Because the two evaluators then share one underlying structure,
their agreement and the derived model's well-formedness become checkable
properties, and a small exhaustive argument shows the transformation has
no inverse in general.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .belief import (
    BeliefEvaluator,
    BeliefModel,
    DerivedWorldviews,
    ExtensionalWorldviews,
    check_belief_wellformed,
    worldview_contains,
)
from .kripke import (
    KripkeEvaluator,
    KripkeModel,
    Pairs,
    check_kripke_wellformed,
)
from .models import ConstructiveFrame, make_interp, valuations_for
from .reports import Report
from .syntax import (
    FALSE,
    Formula,
    FormulaSet,
    Fun,
    RelApp,
    Says,
    Signature,
    free_vars,
    print_formula,
)


class IllFormedModelError(ValueError):
    """Input model failed its well-formedness report."""

    def __init__(self, report: Report):
        super().__init__("ill-formed model: " + report.summary())
        self.report = report


def ktob(model: KripkeModel, validate: bool = True) -> BeliefModel:
    """Build the belief model whose worldviews are what each principal says.

    Worldview membership is computed on demand against the modal model (the
    sets are infinite, so they are never materialized).  With validate on,
    an input failing check_kripke_wellformed is rejected and the exception
    carries the report."""
    if validate:
        report = check_kripke_wellformed(model)
        if not report.ok:
            raise IllFormedModelError(report)
    return BeliefModel(model.frame, DerivedWorldviews(model))


def check_equivalence(model: KripkeModel, probes: Iterable[Formula]) -> Report:
    """Compare modal evaluation with belief evaluation on the derived model.

    Every (probe, world, valuation) point is evaluated under both semantics
    and each disagreement is reported.  Well-formed models admit none; the
    checker does not validate its input, so degenerate models (for example
    ones whose principal-name constants drift between worlds) have their
    disagreements reported rather than masked."""
    report = Report()
    probes = list(probes)
    frame = model.frame
    modal_ev = KripkeEvaluator(model)
    belief_ev = BeliefEvaluator(ktob(model, validate=False), probes)
    points = 0
    for phi in probes:
        variables = free_vars(phi)
        for w in frame.worlds:
            for v in valuations_for(variables, frame, w):
                modal = modal_ev.eval(w, v, phi)
                derived = belief_ev.eval(w, v, phi)
                points += 1
                if modal != derived:
                    report.add(
                        "ktob-equivalence",
                        (w, print_formula(phi), tuple(sorted(v.items()))),
                        "modal evaluation gives %s but the derived "
                        "worldviews give %s" % (modal, derived))
    report.note("agreement checked at %d evaluation points" % points)
    return report


def check_derived_wellformed(model: KripkeModel, probes: Iterable[Formula],
                             proof_depth: int = 2) -> Report:
    """Run the worldview condition checks against the derived model.

    The input is deliberately not validated: feeding in a model that fails
    a frame condition shows which worldview condition breaks downstream."""
    return check_belief_wellformed(ktob(model, validate=False), probes,
                                   proof_depth)


@dataclass(frozen=True)
class ReverseCandidate:
    """One candidate accessibility relation and how it misses the target."""

    relation: Pairs
    proposition_in_target: bool
    proposition_in_derived: bool
    false_in_target: bool
    false_in_derived: bool
    kind: str
    conflict: str

    @property
    def contradictory(self) -> bool:
        return (self.proposition_in_target != self.proposition_in_derived
                or self.false_in_target != self.false_in_derived)

    def to_json(self) -> dict:
        return {
            "relation": sorted(self.relation),
            "proposition_in_target": self.proposition_in_target,
            "proposition_in_derived": self.proposition_in_derived,
            "false_in_target": self.false_in_target,
            "false_in_derived": self.false_in_derived,
            "kind": self.kind,
            "conflict": self.conflict,
        }


@dataclass(frozen=True)
class ReverseTransformDemo:
    """Exhaustive failure of every modal reconstruction of one belief model."""

    target: BeliefModel
    proposition: Formula
    candidates: tuple[ReverseCandidate, ...]

    @property
    def impossible(self) -> bool:
        return all(c.contradictory for c in self.candidates)

    def to_json(self) -> dict:
        return {
            "proposition": print_formula(self.proposition),
            "impossible": self.impossible,
            "candidates": [c.to_json() for c in self.candidates],
        }


def demo_no_reverse_transform() -> ReverseTransformDemo:
    """Exhibit a belief model no modal model derives.

    The target has a single world where X fails, yet the lone principal's
    worldview contains X and omits false.  Over one world there are exactly
    two candidate accessibility relations; the empty one makes the
    principal say false, the reflexive loop stops it from saying X, so
    every candidate contradicts some membership of the target."""
    proposition = RelApp("X")
    sig = Signature({"P": 0}, {"X": 0}, principals=frozenset({"P"}))
    interp = make_interp(domain={"p"}, relations={"X": set()},
                         functions={"P": {(): "p"}})
    frame = ConstructiveFrame(
        worlds=("w",),
        leq=frozenset({("w", "w")}),
        interp={"w": interp},
        principals=frozenset({"p"}),
        signature=sig,
    )
    target = BeliefModel(frame, ExtensionalWorldviews(
        {("w", "p"): FormulaSet([proposition])}))
    proposition_in_target = worldview_contains(target, "w", "p", {},
                                               proposition)
    false_in_target = worldview_contains(target, "w", "p", {}, FALSE)

    name = Fun("P")
    universe = [(a, b) for a in frame.worlds for b in frame.worlds]
    candidates = []
    for size in range(len(universe) + 1):
        for pairs in itertools.combinations(universe, size):
            candidate = KripkeModel(frame, {"p": frozenset(pairs)})
            ev = KripkeEvaluator(candidate)
            in_derived = ev.eval("w", {}, Says(name, proposition))
            false_in_derived = ev.eval("w", {}, Says(name, FALSE))
            if false_in_derived and not false_in_target:
                kind = "says-false-conflict"
                conflict = ("the candidate makes the principal say false, "
                            "which the target worldview lacks")
            elif proposition_in_target and not in_derived:
                kind = "missing-belief-conflict"
                conflict = ("the candidate stops the principal from saying "
                            "%s, which the target worldview contains"
                            % print_formula(proposition))
            else:
                kind = "consistent"
                conflict = ""
            candidates.append(ReverseCandidate(
                relation=frozenset(pairs),
                proposition_in_target=proposition_in_target,
                proposition_in_derived=in_derived,
                false_in_target=false_in_target,
                false_in_derived=false_in_derived,
                kind=kind,
                conflict=conflict,
            ))
    return ReverseTransformDemo(target=target, proposition=proposition,
                                candidates=tuple(candidates))
