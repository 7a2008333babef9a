"""Belief evaluation and worldview conditions, cross-checked against a
straight-line reference evaluator."""

import itertools

import pytest

from focal.belief import (
    BeliefEvaluator,
    BeliefModel,
    DerivedWorldviews,
    ExtensionalWorldviews,
    check_belief_wellformed,
    eval_belief,
    worldview_contains,
)
from focal.kripke import KripkeModel, eval_kripke
from focal.models import (
    ConstructiveFrame,
    EvalError,
    interpret_term,
    make_interp,
    principal_name_map,
    valuations_for,
)
from focal.syntax import (
    FALSE,
    TRUE,
    And,
    Exists,
    Forall,
    FormulaSet,
    Fun,
    Implies,
    Not,
    Or,
    RelApp,
    Says,
    Signature,
    SpeaksFor,
    TermEq,
    Var,
    alpha_equal,
    free_vars,
    probe_closure,
)

from test_kripke import growth_model, m2_model, wsf_violation_model

P1 = Fun("P1")
P2 = Fun("P2")
C = Fun("c")
Z = RelApp("Z")
V = RelApp("V")


# --------------------------------------------------------------------------
# fixtures


def u1_model(p1_view=(Z,), p2_view=()):
    # one world where Z holds; P1 accepts Z, P2 does not
    sig = Signature({"P1": 0, "P2": 0}, {"Z": 0},
                    principals=frozenset({"P1", "P2"}))
    interp = make_interp(domain={"p1", "p2"},
                         relations={"Z": {()}},
                         functions={"P1": {(): "p1"}, "P2": {(): "p2"}})
    frame = ConstructiveFrame(
        worlds=("w",),
        leq=frozenset({("w", "w")}),
        interp={"w": interp},
        principals=frozenset({"p1", "p2"}),
        signature=sig,
    )
    views = ExtensionalWorldviews({("w", "p1"): FormulaSet(p1_view),
                                   ("w", "p2"): FormulaSet(p2_view)})
    return BeliefModel(frame, views)


def two_world_model():
    # P1's worldview grows at u past P2's, so only P2 speaks for P1
    sig = Signature({"P1": 0, "P2": 0}, {"Z": 0, "V": 0},
                    principals=frozenset({"P1", "P2"}))

    def interp(v_true):
        return make_interp(domain={"p1", "p2"},
                           relations={"Z": {()},
                                      "V": {()} if v_true else set()},
                           functions={"P1": {(): "p1"}, "P2": {(): "p2"}})

    frame = ConstructiveFrame(
        worlds=("w", "u"),
        leq=frozenset({("w", "w"), ("u", "u"), ("w", "u")}),
        interp={"w": interp(False), "u": interp(True)},
        principals=frozenset({"p1", "p2"}),
        signature=sig,
    )
    views = ExtensionalWorldviews({
        ("w", "p1"): FormulaSet([Z]),
        ("u", "p1"): FormulaSet([Z, V]),
        ("w", "p2"): FormulaSet([Z]),
        ("u", "p2"): FormulaSet([Z]),
    })
    return BeliefModel(frame, views)


def nonprincipal_model():
    # c denotes an individual outside the principal set
    sig = Signature({"P1": 0, "c": 0}, {"Z": 0},
                    principals=frozenset({"P1"}))
    interp = make_interp(domain={"p1", "d"},
                         relations={"Z": set()},
                         functions={"P1": {(): "p1"}, "c": {(): "d"}})
    frame = ConstructiveFrame(
        worlds=("w",),
        leq=frozenset({("w", "w")}),
        interp={"w": interp},
        principals=frozenset({"p1"}),
        signature=sig,
    )
    views = ExtensionalWorldviews({("w", "p1"): FormulaSet([Z])})
    return BeliefModel(frame, views)


def derived(kripke_model):
    return BeliefModel(kripke_model.frame, DerivedWorldviews(kripke_model))


# --------------------------------------------------------------------------
# reference implementation


def ref_contains(model, w, d, v, phi, probes):
    if d not in model.frame.principals:
        return True
    source = model.worldviews
    if isinstance(source, ExtensionalWorldviews):
        stored = source.table.get((w, d), FormulaSet())
        return any(alpha_equal(phi, psi) for psi in stored)
    name = principal_name_map(model.frame)[d]
    return eval_kripke(source.kripke, w, v, Says(name, phi))


def ref_subset(model, u, d1, d2, v, probes):
    principals = model.frame.principals
    source = model.worldviews
    if isinstance(source, ExtensionalWorldviews):
        if d1 not in principals:
            return d2 not in principals
        if d2 not in principals:
            return True
        small = source.table.get((u, d1), FormulaSet())
        big = source.table.get((u, d2), FormulaSet())
        return all(any(alpha_equal(a, b) for b in big) for a in small)
    if d2 not in principals:
        return True
    domain = sorted(model.frame.interp[u].domain)
    for phi in probes:
        names = sorted(free_vars(phi))
        for picks in itertools.product(domain, repeat=len(names)):
            inst = dict(zip(names, picks))
            if (ref_contains(model, u, d1, inst, phi, probes)
                    and not ref_contains(model, u, d2, inst, phi, probes)):
                return False
    return True


def ref_eval(model, w, v, phi, probes=()):
    frame = model.frame
    ups = [u for u in frame.worlds if (w, u) in frame.leq]
    if isinstance(phi, type(TRUE)):
        return True
    if isinstance(phi, type(FALSE)):
        return False
    if isinstance(phi, RelApp):
        vals = tuple(interpret_term(t, frame, w, v) for t in phi.args)
        return frame.interp[w].rel_holds(phi.name, vals)
    if isinstance(phi, TermEq):
        interp = frame.interp[w]
        return interp.equal(interpret_term(phi.left, frame, w, v),
                            interpret_term(phi.right, frame, w, v))
    if isinstance(phi, And):
        return (ref_eval(model, w, v, phi.left, probes)
                and ref_eval(model, w, v, phi.right, probes))
    if isinstance(phi, Or):
        return (ref_eval(model, w, v, phi.left, probes)
                or ref_eval(model, w, v, phi.right, probes))
    if isinstance(phi, Implies):
        return all(not ref_eval(model, u, v, phi.left, probes)
                   or ref_eval(model, u, v, phi.right, probes) for u in ups)
    if isinstance(phi, Not):
        return all(not ref_eval(model, u, v, phi.body, probes) for u in ups)
    if isinstance(phi, Forall):
        return all(ref_eval(model, u, {**v, phi.var: d}, phi.body, probes)
                   for u in ups for d in frame.interp[u].domain)
    if isinstance(phi, Exists):
        return any(ref_eval(model, w, {**v, phi.var: d}, phi.body, probes)
                   for d in frame.interp[w].domain)
    if isinstance(phi, Says):
        who = interpret_term(phi.speaker, frame, w, v)
        return ref_contains(model, w, who, v, phi.body, probes)
    if isinstance(phi, SpeaksFor):
        d1 = interpret_term(phi.left, frame, w, v)
        d2 = interpret_term(phi.right, frame, w, v)
        return all(ref_subset(model, u, d1, d2, v, probes) for u in ups)
    raise AssertionError(type(phi))


# --------------------------------------------------------------------------
# membership


class TestWorldviewContains:
    def test_non_principals_accept_everything(self):
        model = nonprincipal_model()
        assert worldview_contains(model, "w", "d", {}, FALSE)
        assert worldview_contains(model, "w", "d", {}, Z)

    def test_extensional_membership_is_alpha(self):
        phi = Forall("x", RelApp("Z"))
        psi = Forall("y", RelApp("Z"))
        model = u1_model(p1_view=(phi,))
        assert worldview_contains(model, "w", "p1", {}, psi)
        assert not worldview_contains(model, "w", "p1", {}, Z)

    def test_u1_membership(self):
        model = u1_model()
        assert worldview_contains(model, "w", "p1", {}, Z)
        assert not worldview_contains(model, "w", "p1", {}, Not(Z))
        assert not worldview_contains(model, "w", "p2", {}, Z)

    def test_open_formula_against_extensional_source_errors(self):
        model = u1_model()
        with pytest.raises(EvalError):
            worldview_contains(model, "w", "p1", {"x": "p1"},
                               TermEq(Var("x"), Var("x")))

    def test_derived_membership_reads_the_modal_model(self):
        model = derived(m2_model())
        assert worldview_contains(model, "w", "p", {}, Z)
        assert not worldview_contains(model, "w", "p", {}, Not(Z))

    def test_derived_needs_a_naming_constant(self):
        kripke = m2_model()
        anon_sig = Signature({"k": 0}, {"Z": 0})
        frame = ConstructiveFrame(
            worlds=kripke.frame.worlds,
            leq=kripke.frame.leq,
            interp={w: make_interp(domain={"p"},
                                   relations={"Z": set()},
                                   functions={"k": {(): "p"}})
                    for w in kripke.frame.worlds},
            principals=frozenset({"p"}),
            signature=anon_sig,
        )
        model = BeliefModel(frame, DerivedWorldviews(
            KripkeModel(frame, dict(kripke.accessibility))))
        with pytest.raises(EvalError):
            worldview_contains(model, "w", "p", {}, Z)


# --------------------------------------------------------------------------
# evaluation


class TestEvalBelief:
    def test_constants(self):
        model = u1_model()
        assert eval_belief(model, "w", {}, TRUE)
        assert not eval_belief(model, "w", {}, FALSE)

    def test_u1_falsifies_the_unit_instance(self):
        model = u1_model()
        assert eval_belief(model, "w", {}, Z)
        assert eval_belief(model, "w", {}, Says(P1, Z))
        assert not eval_belief(model, "w", {}, Says(P2, Z))
        assert not eval_belief(model, "w", {}, Implies(Z, Says(P2, Z)))

    def test_says_interprets_the_speaker_here(self):
        model = nonprincipal_model()
        assert eval_belief(model, "w", {}, Says(C, FALSE))
        assert not eval_belief(model, "w", {}, Says(P1, FALSE))

    def test_speaksfor_is_worldview_inclusion_everywhere_above(self):
        model = two_world_model()
        assert eval_belief(model, "w", {}, SpeaksFor(P2, P1))
        assert not eval_belief(model, "w", {}, SpeaksFor(P1, P2))
        assert eval_belief(model, "u", {}, SpeaksFor(P2, P1))

    def test_speaksfor_reflexive_and_transitive(self):
        sig = Signature({"P1": 0, "P2": 0, "P3": 0}, {"Z": 0, "V": 0},
                        principals=frozenset({"P1", "P2", "P3"}))
        interp = make_interp(domain={"p1", "p2", "p3"},
                             relations={"Z": {()}, "V": set()},
                             functions={"P1": {(): "p1"},
                                        "P2": {(): "p2"},
                                        "P3": {(): "p3"}})
        frame = ConstructiveFrame(
            worlds=("w",), leq=frozenset({("w", "w")}),
            interp={"w": interp},
            principals=frozenset({"p1", "p2", "p3"}),
            signature=sig,
        )
        model = BeliefModel(frame, ExtensionalWorldviews({
            ("w", "p1"): FormulaSet(),
            ("w", "p2"): FormulaSet([Z]),
            ("w", "p3"): FormulaSet([Z, V]),
        }))
        for name in (P1, P2, Fun("P3")):
            assert eval_belief(model, "w", {}, SpeaksFor(name, name))
        assert eval_belief(model, "w", {}, SpeaksFor(P1, P2))
        assert eval_belief(model, "w", {}, SpeaksFor(P2, Fun("P3")))
        assert eval_belief(model, "w", {}, SpeaksFor(P1, Fun("P3")))
        assert not eval_belief(model, "w", {}, SpeaksFor(Fun("P3"), P1))

    def test_non_principals_are_universally_spoken_for(self):
        model = nonprincipal_model()
        assert eval_belief(model, "w", {}, SpeaksFor(P1, C))
        assert not eval_belief(model, "w", {}, SpeaksFor(C, P1))

    def test_derived_speaksfor_needs_probes(self):
        model = derived(m2_model())
        phi = SpeaksFor(Fun("P"), Fun("P"))
        with pytest.raises(EvalError):
            eval_belief(model, "w", {}, phi)
        assert eval_belief(model, "w", {}, phi, probes=[Z])

    def test_derived_compromised_principal_absorbs_non_principals(self):
        # c names a non-principal, whose worldview is every formula; the
        # compromised p accepts everything too, so even c speaks for it
        from test_kripke import compromised_model
        model = derived(compromised_model())
        probes = [Z, Not(Z), TRUE, FALSE]
        c, p_name, q_name = Fun("c"), Fun("P"), Fun("Q")
        assert eval_belief(model, "w", {}, SpeaksFor(c, p_name), probes=probes)
        assert not eval_belief(model, "w", {}, SpeaksFor(c, q_name),
                               probes=probes)
        assert eval_belief(model, "w", {}, SpeaksFor(q_name, c), probes=probes)

    def test_derived_agrees_with_modal_evaluation_on_says(self):
        kripke = m2_model()
        model = derived(kripke)
        p_name = Fun("P")
        unit = Implies(Not(Z), Says(p_name, Not(Z)))
        assert not eval_belief(model, "w", {}, unit)
        assert eval_belief(model, "u", {}, unit)

    def test_quantifiers_over_growing_domains(self):
        model = derived(growth_model())
        phi = Forall("x", RelApp("r", (Var("x"),)))
        assert not eval_belief(model, "w", {}, phi)
        assert not eval_belief(model, "u", {}, phi)
        psi = Exists("x", Not(RelApp("r", (Var("x"),))))
        assert not eval_belief(model, "w", {}, psi)
        assert eval_belief(model, "u", {}, psi)


class TestReferenceAgreement:
    def battery(self, model):
        sig = model.frame.signature
        seeds = [FALSE]
        if "Z" in sig.relations:
            seeds.append(Z)
        if "V" in sig.relations:
            seeds.append(V)
        names = [Fun(n) for n in sorted(sig.principals)]
        for t in names:
            seeds.append(SpeaksFor(t, names[0]))
            seeds.append(Implies(Z if "Z" in sig.relations else TRUE,
                                 Says(t, Z if "Z" in sig.relations else TRUE)))
        if "r" in sig.relations:
            seeds.append(Forall("x", RelApp("r", (Var("x"),))))
        return probe_closure(seeds, sig, says_depth=1)

    def test_evaluator_matches_reference(self):
        probes = [Z, Not(Z), TRUE]
        models = [u1_model(), two_world_model(), nonprincipal_model(),
                  derived(m2_model()), derived(wsf_violation_model()),
                  derived(growth_model())]
        for model in models:
            ev = BeliefEvaluator(model, probes)
            for phi in self.battery(model):
                for w in model.frame.worlds:
                    for v in valuations_for(free_vars(phi), model.frame, w):
                        if (isinstance(model.worldviews, ExtensionalWorldviews)
                                and any(free_vars(s.body)
                                        for s in [phi] if isinstance(s, Says))):
                            continue
                        try:
                            mine = ev.eval(w, v, phi)
                        except EvalError:
                            with pytest.raises(EvalError):
                                ref_eval(model, w, v, phi, probes)
                            continue
                        assert mine == ref_eval(model, w, v, phi, probes), \
                            (phi, w, v)


# --------------------------------------------------------------------------
# well-formedness


class TestWellformedStructural:
    def test_unknown_world_and_non_principal_keys(self):
        model = u1_model()
        views = ExtensionalWorldviews({("nowhere", "p1"): FormulaSet([Z]),
                                       ("w", "ghost"): FormulaSet()})
        bad = BeliefModel(model.frame, views)
        report = check_belief_wellformed(bad, [Z])
        assert "worldview-worlds" in report.conditions()
        assert "worldview-principals" in report.conditions()

    def test_stored_formulas_must_be_closed(self):
        phi = RelApp("Z")
        open_phi = TermEq(Var("x"), Var("x"))
        model = u1_model(p1_view=(phi, open_phi))
        report = check_belief_wellformed(model, [])
        assert "worldview-closed" in report.conditions()

    def test_derived_source_must_share_the_frame(self):
        other = u1_model().frame
        with pytest.raises(ValueError):
            BeliefModel(other, DerivedWorldviews(m2_model()))


class TestWellformedConditions:
    def test_closure_flags_a_provable_but_missing_probe(self):
        model = u1_model()
        report = check_belief_wellformed(model, [Z, TRUE], proof_depth=2)
        closure = report.by_condition("worldview-closure")
        assert {v.witness[:2] for v in closure} == {("p1", "w"), ("p2", "w")}
        assert all(v.witness[2] == "true" for v in closure)

    def test_closure_passes_once_the_worldviews_are_topped_up(self):
        model = u1_model(p1_view=(Z, TRUE), p2_view=(TRUE,))
        report = check_belief_wellformed(model, [Z, TRUE], proof_depth=2)
        assert not report.by_condition("worldview-closure")
        assert any("approximate" in note for note in report.notes)

    def test_transparency_satisfied_on_a_says_closed_view(self):
        view = (Z, TRUE, Says(P1, Z), Says(P1, TRUE))
        model = u1_model(p1_view=view,
                         p2_view=(TRUE, Says(P2, TRUE)))
        report = check_belief_wellformed(model, [Z, TRUE])
        transparency = report.by_condition("says-transparency")
        assert [v for v in transparency if v.witness[0] == "p1"] == []

    def test_transparency_violation(self):
        model = u1_model()
        report = check_belief_wellformed(model, [Z])
        transparency = report.by_condition("says-transparency")
        assert transparency and transparency[0].witness[:3] == ("p1", "w", "Z")

    def test_monotonicity_violation(self):
        base = two_world_model()
        views = dict(base.worldviews.table)
        views[("u", "p1")] = FormulaSet()
        model = BeliefModel(base.frame, ExtensionalWorldviews(views))
        report = check_belief_wellformed(model, [])
        monotone = report.by_condition("worldview-monotonicity")
        assert monotone
        assert monotone[0].witness == ("p1", "w", "u", "Z")

    def test_equality_violation(self):
        sig = Signature({"P1": 0, "P2": 0}, {"Z": 0},
                        principals=frozenset({"P1", "P2"}))
        interp = make_interp(domain={"p1", "p2"},
                             eq_blocks=({"p1", "p2"},),
                             relations={"Z": {()}},
                             functions={"P1": {(): "p1"},
                                        "P2": {(): "p2"}})
        frame = ConstructiveFrame(
            worlds=("w",), leq=frozenset({("w", "w")}),
            interp={"w": interp},
            principals=frozenset({"p1", "p2"}),
            signature=sig,
        )
        model = BeliefModel(frame, ExtensionalWorldviews({
            ("w", "p1"): FormulaSet([Z]),
            ("w", "p2"): FormulaSet(),
        }))
        report = check_belief_wellformed(model, [])
        equality = report.by_condition("worldview-equality")
        assert equality and equality[0].witness == ("p1", "p2", "w", "Z")

    def test_hand_off_violation_and_repair(self):
        claim = SpeaksFor(P1, P2)
        broken = u1_model(p1_view=(Z,), p2_view=(claim,))
        report = check_belief_wellformed(broken, [Z])
        hand_off = report.by_condition("belief-hand-off")
        assert hand_off and hand_off[0].witness == ("p1", "p2", "w", "Z")

        repaired = u1_model(p1_view=(Z,), p2_view=(claim, Z))
        report = check_belief_wellformed(repaired, [Z])
        assert not report.by_condition("belief-hand-off")

    def test_valuation_conditions_noted_for_extensional_sources(self):
        report = check_belief_wellformed(u1_model(), [Z])
        assert not [c for c in report.conditions()
                    if c.startswith("worldview-valuations")]
        assert any("by construction" in note for note in report.notes)

    def test_valuation_conditions_probed_for_derived_sources(self):
        model = derived(growth_model())
        probes = [RelApp("r", (Var("x"),)), TRUE]
        report = check_belief_wellformed(model, probes)
        assert not [c for c in report.conditions()
                    if c.startswith("worldview-valuations")]

    def test_derived_from_m2_passes_all_conditions(self):
        kripke = m2_model()
        model = derived(kripke)
        probes = probe_closure([Z, Not(Z)], kripke.frame.signature,
                               says_depth=1)
        report = check_belief_wellformed(model, probes, proof_depth=2)
        assert report.ok, report.summary()

    def test_derived_from_a_richer_model_passes_too(self):
        kripke = wsf_violation_model()
        model = derived(kripke)
        probes = probe_closure([Z, Not(Z)], kripke.frame.signature,
                               says_depth=1)
        report = check_belief_wellformed(model, probes, proof_depth=2)
        assert report.ok, report.summary()
