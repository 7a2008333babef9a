"""Bounded model enumeration, countermodel search, and soundness sweeps.

The enumerator walks every constructive Kripke model inside a finite
bound, keeps exactly the well-formed ones, and produces one representative
per world-relabeling class in a deterministic order.  On top of it sit a
countermodel finder that certifies exhaustion, a randomized proof-rule
soundness sweep, and a persistence sweep for both semantics.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .belief import BeliefEvaluator
from .kripke import (FRAME_CONDITION_CHECKS, KripkeEvaluator, KripkeModel,
                     check_accessibility_equality, check_accessibility_growth,
                     check_f2, check_h, check_id, check_it,
                     check_kripke_wellformed, check_wsf_probe, eval_kripke,
                     is_compromised, restricted_accessibility)
from .ktob import ktob
from .models import (ConstructiveFrame, check_constructive_wellformed,
                     make_interp, valuations_for)
from .proofs import check_derivation, generate_derivation
from .reports import Report
from .syntax import (Forall, Formula, RelApp, Says, Signature, SignatureError,
                     SpeaksFor, Var, canon, free_vars, print_formula,
                     probe_closure, subformulas, validate_formula)

Pairs = frozenset[tuple[str, str]]
Valuation = Mapping[str, str]


def _has_modal(phi: Formula) -> bool:
    return any(isinstance(sub, (Says, SpeaksFor)) for sub in subformulas(phi))


@dataclass(frozen=True)
class SearchBounds:
    """Finite search space for model enumeration.

    Domains hold the principals p0, p1, ... plus at most max_extras
    unnamed individuals that may enter as worlds grow; each principal pi
    is named by a constant Pi.  `relations` fixes the relation symbols as
    (name, arity) pairs.  says_depth sizes the probe closure used for the
    speaksfor agreement check and the sweeps; proof_depth is handed to
    checks that call the prover.
    """

    max_worlds: int = 3
    max_principals: int = 2
    max_extras: int = 0
    relations: tuple[tuple[str, int], ...] = (("Z", 0), ("r", 1))
    says_depth: int = 1
    proof_depth: int = 2

    def relation_map(self) -> dict[str, int]:
        return dict(self.relations)

    def describe(self) -> str:
        rels = ", ".join("%s/%d" % nm for nm in self.relations) or "none"
        return ("worlds <= %d, principals <= %d, extra individuals <= %d, "
                "relations %s, says depth %d" % (
                    self.max_worlds, self.max_principals, self.max_extras,
                    rels, self.says_depth))

    def to_json(self) -> dict:
        return {
            "max_worlds": self.max_worlds,
            "max_principals": self.max_principals,
            "max_extras": self.max_extras,
            "relations": {name: ar for name, ar in self.relations},
            "says_depth": self.says_depth,
            "proof_depth": self.proof_depth,
        }


def signature_for(bounds: SearchBounds, num_principals: int) -> Signature:
    """The signature of enumerated models with the given principal count."""
    functions = {"P%d" % i: 0 for i in range(num_principals)}
    return Signature(functions, bounds.relation_map(),
                     principals=frozenset(functions))


def default_probes(sig: Signature, says_depth: int = 1):
    """One atom per relation symbol on fresh variables, closed under
    subformulas and says prefixes up to says_depth."""
    atoms = []
    for name in sorted(sig.relations):
        arity = sig.relations[name]
        atoms.append(RelApp(name, tuple(Var("x%d" % i) for i in range(arity))))
    return probe_closure(atoms, sig, says_depth)


@dataclass
class EnumerationStats:
    """Tallies from one enumeration run.

    raw_candidates counts the full accessibility assignment space over the
    frames built, before any filtering.  rejected_by counts individual
    filtering decisions by condition name: per candidate relation at the
    one-principal stage, per assembled model afterwards.  duplicates are
    assemblies discarded as world-relabelings of an earlier assembly.
    """

    frames: int = 0
    raw_candidates: int = 0
    assemblies: int = 0
    duplicates: int = 0
    yielded: int = 0
    rejected_by: Counter = field(default_factory=Counter)

    def reject(self, conditions: Iterable[str]) -> None:
        for name in conditions:
            self.rejected_by[name] += 1

    def to_json(self) -> dict:
        return {
            "frames": self.frames,
            "raw_candidates": self.raw_candidates,
            "assemblies": self.assemblies,
            "duplicates": self.duplicates,
            "yielded": self.yielded,
            "rejected_by": dict(sorted(self.rejected_by.items())),
        }


# --------------------------------------------------------------------------
# frame enumeration


def _partial_orders(worlds: tuple[str, ...]) -> list[Pairs]:
    """All partial orders on the given worlds, smallest first."""
    diagonal = [(w, w) for w in worlds]
    off = [(a, b) for a in worlds for b in worlds if a != b]
    out = []
    for bits in range(2 ** len(off)):
        rel = set(diagonal)
        rel.update(pair for i, pair in enumerate(off) if bits >> i & 1)
        if any(a != b and (b, a) in rel for (a, b) in rel):
            continue
        if all((a, d) in rel
               for (a, b) in rel for (c, d) in rel if b == c):
            out.append(frozenset(rel))
    out.sort(key=lambda rel: (len(rel), sorted(rel)))
    return out


def _subsets(items: list) -> list[frozenset]:
    return [frozenset(item for i, item in enumerate(items) if bits >> i & 1)
            for bits in range(2 ** len(items))]


def _monotone_choices(worlds: tuple[str, ...], leq: Pairs,
                      options: Mapping[str, list], grows) -> Iterator[dict]:
    """Assignments of one option per world where grows(before, after)
    holds along every strict leq edge."""
    edges = [(a, b) for (a, b) in leq if a != b]
    for combo in itertools.product(*(options[w] for w in worlds)):
        choice = dict(zip(worlds, combo))
        if all(grows(choice[a], choice[b]) for (a, b) in edges):
            yield choice


def _interp_options(domain: frozenset[str],
                    relations: Mapping[str, int]) -> list[dict[str, Pairs]]:
    """Every relation table over the domain, as name -> tuple set."""
    per_relation = []
    for name in sorted(relations):
        arity = relations[name]
        tuples = sorted(itertools.product(sorted(domain), repeat=arity))
        per_relation.append([(name, s) for s in _subsets(tuples)])
    return [dict(combo) for combo in itertools.product(*per_relation)]


def _tables_grow(before: dict[str, frozenset], after: dict[str, frozenset]) -> bool:
    return all(before[name] <= after[name] for name in before)


def _enumerate_frames(bounds: SearchBounds, worlds: tuple[str, ...],
                      leq: Pairs, num_principals: int,
                      sig: Signature) -> Iterator[ConstructiveFrame]:
    individuals = ["p%d" % i for i in range(num_principals)]
    base = frozenset(individuals)
    extras = ["d%d" % i for i in range(bounds.max_extras)]
    name_tables = {"P%d" % i: {(): individuals[i]}
                   for i in range(num_principals)}
    domain_options = {w: sorted((base | s for s in _subsets(extras)),
                                key=sorted) for w in worlds}
    rels = bounds.relation_map()
    for domains in _monotone_choices(worlds, leq, domain_options,
                                     lambda a, b: a <= b):
        table_options = {w: _interp_options(domains[w], rels) for w in worlds}
        for tables in _monotone_choices(worlds, leq, table_options,
                                        _tables_grow):
            interp = {w: make_interp(domains[w], relations=tables[w],
                                     functions=name_tables) for w in worlds}
            yield ConstructiveFrame(worlds=worlds, leq=leq, interp=interp,
                                    principals=base, signature=sig)


# --------------------------------------------------------------------------
# accessibility enumeration

_BUILTIN_CHECKS = {
    "IT": check_it,
    "ID": check_id,
    "F2": check_f2,
    "H": check_h,
    "accessibility-equality": check_accessibility_equality,
    "s-monotone-acc": check_accessibility_growth,
}
_SINGLE_STAGE = ("IT", "ID", "F2")
_PAIR_STAGE = ("H", "accessibility-equality")


def _registry_unmodified() -> bool:
    return (set(FRAME_CONDITION_CHECKS) == set(_BUILTIN_CHECKS)
            and all(FRAME_CONDITION_CHECKS[k] is _BUILTIN_CHECKS[k]
                    for k in _BUILTIN_CHECKS))


def _all_relations(worlds: tuple[str, ...]) -> list[Pairs]:
    pairs = [(a, b) for a in worlds for b in worlds]
    return _subsets(pairs)


_PROBE_SIG = Signature({"P0": 0}, {}, principals=frozenset({"P0"}))


def _order_only_frame(worlds: tuple[str, ...], leq: Pairs) -> ConstructiveFrame:
    """A one-individual frame carrying just the order, enough for the
    order-and-relation conditions."""
    interp = {w: make_interp({"p0"}, functions={"P0": {(): "p0"}})
              for w in worlds}
    return ConstructiveFrame(worlds=worlds, leq=leq, interp=interp,
                             principals=frozenset({"p0"}),
                             signature=_PROBE_SIG)


def _single_stage_survivors(worlds: tuple[str, ...], leq: Pairs,
                            candidates: list[Pairs],
                            stats: EnumerationStats) -> list[Pairs]:
    """Candidate relations passing the per-principal order conditions.

    The built-in IT/ID/F2 checks read only the growth order and one
    relation, so they are evaluated once per order on a minimal frame and
    shared by every frame and principal under it.
    """
    frame = _order_only_frame(worlds, leq)
    out = []
    for acc in candidates:
        model = KripkeModel(frame, {"p0": acc})
        failed = [key for key in _SINGLE_STAGE
                  if not FRAME_CONDITION_CHECKS[key](model).ok]
        if failed:
            stats.reject(failed)
        else:
            out.append(acc)
    return out


def _growth_survivors(frame: ConstructiveFrame, candidates: list[Pairs],
                      stats: EnumerationStats) -> list[int]:
    first = sorted(frame.principals)[0]
    out = []
    for i, acc in enumerate(candidates):
        model = KripkeModel(frame, {first: acc})
        if FRAME_CONDITION_CHECKS["s-monotone-acc"](model).ok:
            out.append(i)
        else:
            stats.reject(["s-monotone-acc"])
    return out


class _PosetData:
    """Per-order caches shared by every frame over one (worlds, leq).

    All of this depends only on the growth order and one candidate
    relation at a time: the per-principal condition survivors, condition
    H marginals (compromised worlds and restricted accessibility, which
    the built-in check compares pairwise), successor world masks for the
    says clause, and relabeled encodings for the dedupe key.
    """

    def __init__(self, worlds: tuple[str, ...], leq: Pairs,
                 candidates: list[Pairs], stats: EnumerationStats):
        self.worlds = worlds
        self.single = _single_stage_survivors(worlds, leq, candidates, stats)
        index = {w: i for i, w in enumerate(worlds)}
        ups = {w: [u for u in worlds if (w, u) in leq] for w in worlds}
        frame = _order_only_frame(worlds, leq)
        self.compromised: list[tuple[str, ...]] = []
        self.theta: list[dict[str, Pairs]] = []
        self.succ: list[list[int]] = []
        for acc in self.single:
            model = KripkeModel(frame, {"p0": acc})
            self.compromised.append(tuple(
                w for w in worlds if is_compromised(model, "p0", w)))
            self.theta.append({
                w: restricted_accessibility(model, "p0", w) for w in worlds})
            masks = []
            for w in worlds:
                mask = 0
                for (a, b) in acc:
                    if a in ups[w]:
                        mask |= 1 << index[b]
                masks.append(mask)
            self.succ.append(masks)
        self._dominates: dict[tuple[int, int], bool] = {}
        perms = [{worlds[i]: "w%d" % p[i] for i in range(len(worlds))}
                 for p in itertools.permutations(range(len(worlds)))]
        self.perms = perms
        self.renamed = [[tuple(sorted((m[a], m[b]) for (a, b) in acc))
                         for acc in self.single] for m in perms]

    def dominated(self, i: int, j: int) -> bool:
        """Wherever relation i is compromised, its restricted relation
        stays inside relation j's."""
        key = (i, j)
        cached = self._dominates.get(key)
        if cached is None:
            theirs = self.theta[j]
            mine = self.theta[i]
            cached = all(mine[w] <= theirs[w] for w in self.compromised[i])
            self._dominates[key] = cached
        return cached

    def assembly_ok(self, combo: tuple[int, ...]) -> bool:
        for i in combo:
            for j in combo:
                if i != j and not self.dominated(i, j):
                    return False
        return True


def _canonical_key(model: KripkeModel) -> tuple:
    """Least encoding of the model over all world relabelings."""
    worlds = model.frame.worlds
    best = None
    for perm in itertools.permutations(range(len(worlds))):
        names = {worlds[i]: "w%d" % perm[i] for i in range(len(worlds))}
        enc = _encode(model, names)
        if best is None or enc < best:
            best = enc
    return best


def _encode(model: KripkeModel, names: Mapping[str, str]) -> tuple:
    frame = model.frame
    order = sorted(frame.worlds, key=lambda w: names[w])
    leq = tuple(sorted((names[a], names[b]) for (a, b) in frame.leq))
    interps = []
    for w in order:
        interp = frame.interp[w]
        interps.append((
            tuple(sorted(interp.domain)),
            tuple(sorted(tuple(sorted(block)) for block in interp.eq_blocks)),
            tuple(sorted((name, tuple(sorted(tuples)))
                         for name, tuples in interp.relations.items())),
            tuple(sorted((name, tuple(sorted(table.items())))
                         for name, table in interp.functions.items())),
        ))
    acc = tuple(sorted((p, tuple(sorted((names[a], names[b])
                                        for (a, b) in rel)))
                       for p, rel in model.accessibility.items()))
    return (len(frame.worlds), leq, tuple(sorted(frame.principals)),
            tuple(interps), acc)


def _encode_frame(frame: ConstructiveFrame, names: Mapping[str, str]) -> tuple:
    order = sorted(frame.worlds, key=lambda w: names[w])
    leq = tuple(sorted((names[a], names[b]) for (a, b) in frame.leq))
    interps = []
    for w in order:
        interp = frame.interp[w]
        interps.append((
            tuple(sorted(interp.domain)),
            tuple(sorted(tuple(sorted(block)) for block in interp.eq_blocks)),
            tuple(sorted((name, tuple(sorted(tuples)))
                         for name, tuples in interp.relations.items())),
            tuple(sorted((name, tuple(sorted(table.items())))
                         for name, table in interp.functions.items())),
        ))
    return (len(frame.worlds), leq, tuple(sorted(frame.principals)),
            tuple(interps))


def enumerate_kripke_models(bounds: SearchBounds = SearchBounds(),
                            stats: EnumerationStats | None = None,
                            probes: Iterable[Formula] | None = None,
                            ) -> Iterator[KripkeModel]:
    """Every well-formed Kripke model within bounds, one representative per
    world-relabeling class, in a deterministic order.

    A yielded model passes the structural checks, the constructive frame
    laws, every registered frame condition, and the speaksfor agreement
    check on the probe set (by default the atom closure of its signature
    at bounds.says_depth).  When the frame-condition registry holds
    exactly the built-in checks the work is staged for speed; with a
    patched registry every registered check runs on every assembled
    candidate, so registry changes show up directly in the output stream.
    """
    if stats is None:
        stats = EnumerationStats()
    fast = _registry_unmodified()
    probe_list = None if probes is None else list(probes)
    seen: set[tuple] = set()
    frame_ids: dict[tuple, int] = {}
    for n in range(1, bounds.max_worlds + 1):
        worlds = tuple("w%d" % i for i in range(n))
        candidates = _all_relations(worlds)
        for leq in _partial_orders(worlds):
            poset = (_PosetData(worlds, leq, candidates, stats)
                     if fast else None)
            for k in range(1, bounds.max_principals + 1):
                sig = signature_for(bounds, k)
                if probe_list is None:
                    probeset = list(default_probes(sig, bounds.says_depth))
                else:
                    probeset = [phi for phi in probe_list
                                if _fits(phi, sig)]
                masked_ok = probe_list is None and bounds.says_depth <= 1
                individuals = ["p%d" % i for i in range(k)]
                for frame in _enumerate_frames(bounds, worlds, leq, k, sig):
                    constructive = check_constructive_wellformed(frame)
                    if not constructive.ok:
                        stats.reject(sorted(constructive.conditions()))
                        continue
                    stats.frames += 1
                    stats.raw_candidates += len(candidates) ** k
                    if fast:
                        yield from _assemble_fast(
                            frame, individuals, poset, probeset, masked_ok,
                            bounds.says_depth, seen, frame_ids, stats)
                    else:
                        yield from _assemble_checked(frame, individuals,
                                                     candidates, probeset,
                                                     seen, stats)


def _atom_instance_masks(frame: ConstructiveFrame) -> list[int]:
    """World-set bitmasks for every closed relation atom over the shared
    domain, in relation-name order then argument order."""
    worlds = frame.worlds
    domain = sorted(frame.interp[worlds[0]].domain)
    rels = frame.signature.relations
    masks = []
    for name in sorted(rels):
        for args in itertools.product(domain, repeat=rels[name]):
            mask = 0
            for wi, w in enumerate(worlds):
                if frame.interp[w].rel_holds(name, args):
                    mask |= 1 << wi
            masks.append(mask)
    return masks


def _assemble_fast(frame: ConstructiveFrame, individuals: list[str],
                   poset: _PosetData, probeset: list[Formula],
                   masked_ok: bool, says_depth: int, seen: set,
                   frame_ids: dict[tuple, int],
                   stats: EnumerationStats) -> Iterator[KripkeModel]:
    """Assembly under the built-in registry.

    Equality blocks are singletons in every enumerated frame, so the
    accessibility-equality condition holds vacuously; condition H comes
    from the poset's pair table.  With one principal the speaksfor
    agreement check compares a name with itself and cannot fail, so it is
    skipped; with more, constant domains and the default probe set allow
    a bitmask evaluation of the same verdict, and anything else falls
    back to the generic probe checker.
    """
    k = len(individuals)
    worlds = frame.worlds
    n = len(worlds)
    survivors = _growth_survivors(frame, poset.single, stats)
    frame_encs = [_encode_frame(frame, m) for m in poset.perms]
    best = min(frame_encs)
    fid = frame_ids.setdefault(best, len(frame_ids))
    stabilizers = [i for i, enc in enumerate(frame_encs) if enc == best]
    domains = [frame.interp[w].domain for w in worlds]
    masked_wsf = (k >= 2 and masked_ok
                  and all(d == domains[0] for d in domains))
    wsf_ok = None
    if masked_wsf:
        atom_masks = _atom_instance_masks(frame)
        arange = range(len(atom_masks))
        krange = range(k)
        succ = poset.succ
        theta = poset.theta
        cache: dict[int, tuple[list[int], list[int]]] = {}

        def slot_data(i: int) -> tuple[list[int], list[int]]:
            """Per candidate: world masks of `says atom`, and the atom
            part of the said-set at each world, transposed."""
            data = cache.get(i)
            if data is None:
                masks = []
                for m in atom_masks:
                    bits = 0
                    for w in range(n):
                        if succ[i][w] & ~m == 0:
                            bits |= 1 << w
                    masks.append(bits)
                atoms_at = [sum(((masks[a] >> w) & 1) << a for a in arange)
                            for w in range(n)]
                data = (masks, atoms_at)
                cache[i] = data
            return data

        def wsf_ok(combo: tuple[int, ...]) -> bool:
            slots = [slot_data(i) for i in combo]
            for w in range(n):
                said = []
                for s in krange:
                    bits = slots[s][1][w]
                    if says_depth >= 1:
                        pos = len(atom_masks)
                        succ_w = succ[combo[s]][w]
                        for j in krange:
                            partner = slots[j][0]
                            for a in arange:
                                if succ_w & ~partner[a] == 0:
                                    bits |= 1 << pos
                                pos += 1
                    said.append(bits)
                wname = worlds[w]
                for s in krange:
                    for t in krange:
                        if s == t or combo[s] == combo[t]:
                            continue
                        if (said[s] & ~said[t] == 0
                                and not theta[combo[t]][wname]
                                <= theta[combo[s]][wname]):
                            return False
            return True

    for combo in itertools.product(survivors, repeat=k):
        stats.assemblies += 1
        if not poset.assembly_ok(combo):
            stats.reject(["H"])
            continue
        if masked_wsf and not wsf_ok(combo):
            stats.reject(["WSF"])
            continue
        key = (fid, min(tuple(poset.renamed[p][i] for i in combo)
                        for p in stabilizers))
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        model = KripkeModel(frame,
                            {ind: poset.single[i]
                             for ind, i in zip(individuals, combo)})
        if k >= 2 and not masked_wsf:
            wsf = check_wsf_probe(model, probeset)
            if wsf.violations:
                stats.reject(sorted(wsf.conditions()))
                continue
        stats.yielded += 1
        yield model


def _assemble_checked(frame: ConstructiveFrame, individuals: list[str],
                      candidates: list[Pairs], probeset: list[Formula],
                      seen: set, stats: EnumerationStats) -> Iterator[KripkeModel]:
    # transparent path for a patched registry: the full checker runs on
    # every assembly, so it is meant for small bounds
    for accs in itertools.product(candidates, repeat=len(individuals)):
        stats.assemblies += 1
        model = KripkeModel(frame, dict(zip(individuals, accs)))
        report = check_kripke_wellformed(model, probeset)
        if report.violations:
            stats.reject(sorted(report.conditions()))
            continue
        key = _canonical_key(model)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        stats.yielded += 1
        yield model


def _fits(phi: Formula, sig: Signature) -> bool:
    try:
        validate_formula(phi, sig)
    except SignatureError:
        return False
    return True


# --------------------------------------------------------------------------
# countermodel search


def universal_closure(phi: Formula) -> Formula:
    out = phi
    for x in sorted(free_vars(phi), reverse=True):
        out = Forall(x, out)
    return out


@dataclass
class CountermodelResult:
    """A falsifying model and world, or an exhaustion certificate.

    models_checked counts the enumerated well-formed models whose
    signature could interpret the formula; incompatible counts the rest.
    The formula is the universal closure of the search target.
    """

    formula: Formula
    bounds: SearchBounds
    countermodel: KripkeModel | None
    world: str | None
    valuation: dict[str, str]
    models_checked: int
    incompatible: int
    stats: EnumerationStats

    @property
    def found(self) -> bool:
        return self.countermodel is not None

    def certificate(self) -> str:
        if self.found:
            return ("countermodel found at world %r: %s fails there"
                    % (self.world, print_formula(self.formula)))
        return ("exhausted %d well-formed models (%s) without falsifying %s"
                % (self.models_checked, self.bounds.describe(),
                   print_formula(self.formula)))

    def to_json(self) -> dict:
        return {
            "formula": print_formula(self.formula),
            "found": self.found,
            "world": self.world,
            "valuation": dict(self.valuation),
            "models_checked": self.models_checked,
            "incompatible_models": self.incompatible,
            "bounds": self.bounds.to_json(),
            "stats": self.stats.to_json(),
        }


def find_countermodel(phi: Formula,
                      bounds: SearchBounds = SearchBounds(),
                      probes: Iterable[Formula] | None = None,
                      ) -> CountermodelResult:
    """Search the bounded sweep for a world falsifying phi.

    Free variables are universally closed first, so a hit is always a
    closed falsification; it is re-checked with a fresh evaluator before
    being returned.  A miss certifies that every well-formed model within
    bounds satisfies the closure at every world.
    """
    closed = universal_closure(phi)
    stats = EnumerationStats()
    checked = 0
    incompatible = 0
    for model in enumerate_kripke_models(bounds, stats=stats, probes=probes):
        if not _fits(closed, model.frame.signature):
            incompatible += 1
            continue
        checked += 1
        ev = KripkeEvaluator(model)
        for w in model.frame.worlds:
            if not ev.eval(w, {}, closed):
                if eval_kripke(model, w, {}, closed):
                    raise RuntimeError(
                        "countermodel failed re-verification at %r" % w)
                return CountermodelResult(closed, bounds, model, w, {},
                                          checked, incompatible, stats)
    return CountermodelResult(closed, bounds, None, None, {},
                              checked, incompatible, stats)


# --------------------------------------------------------------------------
# randomized soundness sweep


def _sequent_key(sequent) -> tuple:
    return (frozenset(canon(g) for g in sequent.context), canon(sequent.goal))


def soundness_fuzz(n: int, bounds: SearchBounds = SearchBounds(),
                   rng_seed: int = 0, gen_depth: int = 3,
                   models: list[KripkeModel] | None = None) -> Report:
    """Random derivations against the bounded sweep, in both semantics.

    Each of the n seeds rng_seed..rng_seed+n-1 yields one derivation; its
    conclusion must hold at every point of every enumerated model where
    all hypotheses hold, under the modal evaluator and under the belief
    evaluator of the derived worldview model.  Same arguments, same
    report, bit for bit.  Pass a models list enumerated at the same
    bounds to share one sweep across calls.
    """
    report = Report()
    sig = signature_for(bounds, bounds.max_principals)
    sequents: dict[tuple, tuple[int, object]] = {}
    for i in range(n):
        derivation = generate_derivation(rng_seed + i, sig, gen_depth)
        verdict = check_derivation(derivation)
        if not verdict.ok:
            report.add("generator-invalid", (rng_seed + i, verdict.where()),
                       "generated derivation rejected: %s" % verdict.message)
            continue
        sequents.setdefault(_sequent_key(derivation.conclusion),
                            (rng_seed + i, derivation.conclusion))
    if models is None:
        models = list(enumerate_kripke_models(bounds))
    prepared = []
    for seed, sequent in sequents.values():
        names: frozenset[str] = frozenset(free_vars(sequent.goal)).union(
            *(free_vars(g) for g in sequent.context))
        # formulas without a modal connective evaluate identically in both
        # semantics and never read the accessibility relations, so their
        # verdicts are determined by the frame and shared across its
        # models; closed formulas keep one value across the valuations of
        # a world, so their checks hoist out of the valuation loop
        plain = tuple(g for g in sequent.context if not _has_modal(g))
        modal = tuple(g for g in sequent.context if _has_modal(g))
        modal_closed = tuple(g for g in modal if not free_vars(g))
        modal_open = tuple(g for g in modal if free_vars(g))
        goal_modal = _has_modal(sequent.goal)
        goal_closed = not free_vars(sequent.goal)
        prepared.append((seed, sequent, plain, modal_closed, modal_open,
                         goal_modal, goal_closed, names))
    # fit and probe construction depend only on the signature, which the
    # sweep shares across every model with the same principal count
    sig_tokens: dict = {}
    fits_cache: dict[tuple[int, int], bool] = {}
    probes_by_token: dict[int, list[Formula]] = {}
    kripke_points = 0
    belief_points = 0
    frame_seen = None
    frame_ev = None
    vals_cache: dict[tuple[frozenset[str], str], list[Valuation]] = {}
    plain_pass: dict[tuple[int, str], list[Valuation]] = {}
    plain_lift: dict[int, tuple[int, list[tuple[str, tuple]]]] = {}
    no_bindings: dict[str, str] = {}
    for index, model in enumerate(models):
        frame = model.frame
        sig_key = (tuple(sorted(frame.signature.functions.items())),
                   tuple(sorted(frame.signature.relations.items())),
                   frame.signature.principals)
        token = sig_tokens.setdefault(sig_key, len(sig_tokens))
        probes = probes_by_token.get(token)
        if probes is None:
            probes = list(default_probes(frame.signature, bounds.says_depth))
            probes_by_token[token] = probes
        if frame is not frame_seen:
            frame_seen = frame
            frame_ev = KripkeEvaluator(model)
            vals_cache = {}
            plain_pass = {}
            plain_lift = {}
        kripke_ev = KripkeEvaluator(model)
        belief_ev = BeliefEvaluator(ktob(model, validate=False),
                                    probes=probes, kripke_evaluator=kripke_ev)
        fev = frame_ev.eval
        kev = kripke_ev.eval
        bev = belief_ev.eval
        for si, (seed, sequent, plain, modal_closed, modal_open, goal_modal,
                 goal_closed, names) in enumerate(prepared):
            fits = fits_cache.get((si, token))
            if fits is None:
                fits = all(_fits(g, frame.signature)
                           for g in sequent.context) and _fits(sequent.goal,
                                                               frame.signature)
                fits_cache[(si, token)] = fits
            if not fits:
                continue
            goal = sequent.goal
            if not modal_closed and not modal_open and not goal_modal:
                # verdicts are frame-determined: count and replay per model
                lifted = plain_lift.get(si)
                if lifted is None:
                    held = 0
                    fails: list[tuple[str, tuple]] = []
                    for w in frame.worlds:
                        for v in valuations_for(names, frame, w):
                            if not all(fev(w, v, g) for g in plain):
                                continue
                            held += 1
                            if not fev(w, v, goal):
                                fails.append(
                                    (w, tuple(sorted(v.items()))))
                    lifted = (held, fails)
                    plain_lift[si] = lifted
                held, fails = lifted
                kripke_points += held
                belief_points += held
                for (w, witness) in fails:
                    report.add("kripke-soundness", (seed, index, w, witness),
                               "provable sequent %s fails at world %r"
                               % (sequent, w))
                    report.add("belief-soundness", (seed, index, w, witness),
                               "provable sequent %s fails at world %r "
                               "of the derived belief model" % (sequent, w))
                continue
            for w in frame.worlds:
                vset = plain_pass.get((si, w))
                if vset is None:
                    vals = vals_cache.get((names, w))
                    if vals is None:
                        vals = list(valuations_for(names, frame, w))
                        vals_cache[(names, w)] = vals
                    vset = ([v for v in vals
                             if all(fev(w, v, g) for g in plain)]
                            if plain else vals)
                    plain_pass[(si, w)] = vset
                if not vset:
                    continue
                k_ok = True
                for g in modal_closed:
                    if not kev(w, no_bindings, g):
                        k_ok = False
                        break
                b_ok = True
                for g in modal_closed:
                    if not bev(w, no_bindings, g):
                        b_ok = False
                        break
                if not (k_ok or b_ok):
                    continue
                if not modal_open:
                    # hypotheses are settled for every valuation at once
                    if k_ok:
                        kripke_points += len(vset)
                    if b_ok:
                        belief_points += len(vset)
                    if goal_closed:
                        if goal_modal:
                            bad_k = k_ok and not kev(w, no_bindings, goal)
                            bad_b = b_ok and not bev(w, no_bindings, goal)
                        else:
                            shared = fev(w, no_bindings, goal)
                            bad_k = k_ok and not shared
                            bad_b = b_ok and not shared
                        if bad_k:
                            for v in vset:
                                report.add(
                                    "kripke-soundness",
                                    (seed, index, w,
                                     tuple(sorted(v.items()))),
                                    "provable sequent %s fails at world %r"
                                    % (sequent, w))
                        if bad_b:
                            for v in vset:
                                report.add(
                                    "belief-soundness",
                                    (seed, index, w,
                                     tuple(sorted(v.items()))),
                                    "provable sequent %s fails at world %r "
                                    "of the derived belief model"
                                    % (sequent, w))
                        continue
                    for v in vset:
                        if goal_modal:
                            holds_k = not k_ok or kev(w, v, goal)
                            holds_b = not b_ok or bev(w, v, goal)
                        else:
                            shared = fev(w, v, goal)
                            holds_k = not k_ok or shared
                            holds_b = not b_ok or shared
                        if not holds_k:
                            report.add(
                                "kripke-soundness",
                                (seed, index, w, tuple(sorted(v.items()))),
                                "provable sequent %s fails at world %r"
                                % (sequent, w))
                        if not holds_b:
                            report.add(
                                "belief-soundness",
                                (seed, index, w, tuple(sorted(v.items()))),
                                "provable sequent %s fails at world %r "
                                "of the derived belief model" % (sequent, w))
                    continue
                for v in vset:
                    goal_shared = None
                    hyps_k = k_ok
                    if hyps_k:
                        for g in modal_open:
                            if not kev(w, v, g):
                                hyps_k = False
                                break
                    if hyps_k:
                        kripke_points += 1
                        if goal_modal:
                            holds = kev(w, v, goal)
                        else:
                            goal_shared = fev(w, v, goal)
                            holds = goal_shared
                        if not holds:
                            report.add(
                                "kripke-soundness",
                                (seed, index, w, tuple(sorted(v.items()))),
                                "provable sequent %s fails at world %r"
                                % (sequent, w))
                    hyps_b = b_ok
                    if hyps_b:
                        for g in modal_open:
                            if not bev(w, v, g):
                                hyps_b = False
                                break
                    if hyps_b:
                        belief_points += 1
                        if goal_modal:
                            holds = bev(w, v, goal)
                        elif goal_shared is not None:
                            holds = goal_shared
                        else:
                            holds = fev(w, v, goal)
                        if not holds:
                            report.add(
                                "belief-soundness",
                                (seed, index, w, tuple(sorted(v.items()))),
                                "provable sequent %s fails at world %r "
                                "of the derived belief model" % (sequent, w))
    report.note("%d derivations, %d distinct conclusions, %d models"
                % (n, len(sequents), len(models)))
    report.note("hypotheses held at %d modal and %d belief points"
                % (kripke_points, belief_points))
    return report


# --------------------------------------------------------------------------
# persistence sweep


def monotonicity_suite(bounds: SearchBounds = SearchBounds(),
                       probes: Iterable[Formula] | None = None,
                       models: list[KripkeModel] | None = None) -> Report:
    """Truth must persist along the growth order, in both semantics.

    Every probe true at a world stays true at every later world, under
    the modal evaluator and under the belief evaluator of the derived
    worldview model; valuations range over the earlier world's domain.
    """
    report = Report()
    if models is None:
        models = list(enumerate_kripke_models(bounds))
    probe_list = None if probes is None else list(probes)
    points = 0
    for index, model in enumerate(models):
        frame = model.frame
        if probe_list is None:
            selected = list(default_probes(frame.signature, bounds.says_depth))
        else:
            selected = [phi for phi in probe_list
                        if _fits(phi, frame.signature)]
        kripke_ev = KripkeEvaluator(model)
        belief_ev = BeliefEvaluator(ktob(model, validate=False),
                                    probes=selected)
        edges = [(a, b) for (a, b) in frame.leq if a != b]
        for phi in selected:
            fv = free_vars(phi)
            for (a, b) in edges:
                for v in valuations_for(fv, frame, a):
                    points += 1
                    if (kripke_ev.eval(a, v, phi)
                            and not kripke_ev.eval(b, v, phi)):
                        report.add(
                            "kripke-monotonicity",
                            (index, a, b, print_formula(phi),
                             tuple(sorted(v.items()))),
                            "%s holds at %r but not above it at %r"
                            % (print_formula(phi), a, b))
                    if (belief_ev.eval(a, v, phi)
                            and not belief_ev.eval(b, v, phi)):
                        report.add(
                            "belief-monotonicity",
                            (index, a, b, print_formula(phi),
                             tuple(sorted(v.items()))),
                            "%s holds at %r but not above it at %r "
                            "in the derived belief model"
                            % (print_formula(phi), a, b))
    report.note("persistence checked at %d points across %d models"
                % (points, len(models)))
    return report
