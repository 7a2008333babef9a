"""Finite constructive frames: worlds ordered by growth of knowledge, each
carrying a first-order structure whose domain, equality, relations and
function tables may only grow or coarsen along the order.

Checkers return Reports instead of raising; evaluation raises EvalError only
for inputs that are not meaningful at all (unbound variable, value outside
the world's domain).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .reports import Report
from .syntax import Fun, Signature, Term, Var

Valuation = Mapping[str, str]


class EvalError(Exception):
    pass


@dataclass(frozen=True)
class FirstOrderInterp:
    """One world's structure.  eq_blocks partitions the domain; relations
    hold raw tuples; functions map argument tuples to values and must be
    total on the domain."""

    domain: frozenset[str]
    eq_blocks: tuple[frozenset[str], ...]
    relations: Mapping[str, frozenset[tuple[str, ...]]]
    functions: Mapping[str, Mapping[tuple[str, ...], str]]

    def block_of(self, d: str) -> frozenset[str] | None:
        for block in self.eq_blocks:
            if d in block:
                return block
        return None

    def equal(self, d1: str, d2: str) -> bool:
        if d1 == d2:
            return d1 in self.domain
        b = self.block_of(d1)
        return b is not None and d2 in b

    def rel_holds(self, name: str, args: tuple[str, ...]) -> bool:
        return args in self.relations.get(name, frozenset())

    def fun_value(self, name: str, args: tuple[str, ...]) -> str:
        table = self.functions.get(name)
        if table is None or args not in table:
            raise EvalError("function %r has no value at %r" % (name, args))
        return table[args]


def make_interp(domain: Iterable[str],
                eq_blocks: Iterable[Iterable[str]] = (),
                relations: Mapping[str, Iterable[tuple[str, ...]]] | None = None,
                functions: Mapping[str, Mapping[tuple[str, ...], str]] | None = None,
                ) -> FirstOrderInterp:
    """Convenience builder: omitted equality blocks become singletons."""
    dom = frozenset(domain)
    blocks = [frozenset(b) for b in eq_blocks]
    covered = set().union(*blocks) if blocks else set()
    for d in sorted(dom - covered):
        blocks.append(frozenset((d,)))
    rels = {name: frozenset(tuple(t) for t in tuples)
            for name, tuples in (relations or {}).items()}
    funs = {name: dict(table) for name, table in (functions or {}).items()}
    return FirstOrderInterp(dom, tuple(blocks), rels, funs)


@dataclass(frozen=True)
class ConstructiveFrame:
    """Worlds, a growth order `leq` over them, a structure per world, and
    the set of individuals that count as principals (members of every
    world's domain)."""

    worlds: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    interp: Mapping[str, FirstOrderInterp]
    principals: frozenset[str]
    signature: Signature

    def up(self, w: str) -> tuple[str, ...]:
        """Worlds w' with w <= w', in declaration order."""
        return tuple(u for u in self.worlds if (w, u) in self.leq)

    def interp_at(self, w: str) -> FirstOrderInterp:
        try:
            return self.interp[w]
        except KeyError:
            raise EvalError("unknown world %r" % w) from None


def interpret_term(tau: Term, frame: ConstructiveFrame, w: str, v: Valuation) -> str:
    """Value of tau at world w under valuation v."""
    interp = frame.interp_at(w)
    match tau:
        case Var(name):
            try:
                d = v[name]
            except KeyError:
                raise EvalError("variable %r is not bound by the valuation" % name) from None
            if d not in interp.domain:
                raise EvalError("valuation sends %r to %r, outside the domain at %r"
                                % (name, d, w))
            return d
        case Fun(name, args):
            vals = tuple(interpret_term(a, frame, w, v) for a in args)
            return interp.fun_value(name, vals)
    raise TypeError("not a term: %r" % (tau,))


def valuations_for(variables: Iterable[str], frame: ConstructiveFrame,
                   w: str) -> list[dict[str, str]]:
    """All maps from the given variables into the domain at w, in a stable
    order (variables sorted, domain sorted)."""
    names = sorted(set(variables))
    dom = sorted(frame.interp_at(w).domain)
    out = []
    for combo in itertools.product(dom, repeat=len(names)):
        out.append(dict(zip(names, combo)))
    return out


def principal_equality(frame: ConstructiveFrame) -> dict[str, frozenset[str]]:
    """Partition of the principals under "equal at every world"."""
    blocks: dict[str, set[str]] = {p: set(frame.principals) for p in frame.principals}
    for w in frame.worlds:
        interp = frame.interp[w]
        for p in frame.principals:
            blocks[p] &= {q for q in frame.principals if interp.equal(p, q)}
    return {p: frozenset(b) for p, b in blocks.items()}


def principal_name_map(frame: ConstructiveFrame) -> dict[str, Fun]:
    """Map each principal to a declared constant denoting it at every world.

    A constant whose value moves between worlds names nobody; when several
    constants share a principal the alphabetically first one wins."""
    out: dict[str, Fun] = {}
    for symbol in sorted(frame.signature.principals):
        values: set[str] = set()
        for w in frame.worlds:
            interp = frame.interp.get(w)
            table = interp.functions.get(symbol, {}) if interp else {}
            if () not in table:
                values.clear()
                break
            values.add(table[()])
        if len(values) == 1:
            out.setdefault(values.pop(), Fun(symbol))
    return out


# --------------------------------------------------------------------------
# well-formedness


def check_constructive_wellformed(frame: ConstructiveFrame,
                                  accessibility: Mapping[str, frozenset[tuple[str, str]]] | None = None,
                                  ) -> Report:
    """Check the frame laws: leq is a partial order, principals inhabit every
    domain, each structure is internally coherent, and the structure grows
    monotonically along leq and along every accessibility relation given.

    Growth along an edge w -> w' means: (i) the domain can only grow,
    (ii) individuals equal at w stay equal at w', (iii) relation tuples
    persist, (iv) function tables keep their old outputs up to equality at
    the earlier world w.
    """
    report = Report()
    worlds = frame.worlds
    wset = set(worlds)

    if len(wset) != len(worlds):
        report.add("worlds-distinct", (worlds,), "duplicate world ids")
    for w in worlds:
        if w not in frame.interp:
            report.add("interp-total", (w,), "world %r has no structure" % w)
    for (a, b) in frame.leq:
        if a not in wset or b not in wset:
            report.add("leq-domain", (a, b), "leq mentions unknown world")

    for w in worlds:
        if (w, w) not in frame.leq:
            report.add("leq-reflexive", (w,), "missing %r <= %r" % (w, w))
    for (a, b) in sorted(frame.leq):
        for (c, d) in sorted(frame.leq):
            if b == c and (a, d) not in frame.leq:
                report.add("leq-transitive", (a, b, d),
                           "%r <= %r <= %r but not %r <= %r" % (a, b, d, a, d))
        if a != b and (b, a) in frame.leq:
            report.add("leq-antisymmetric", (a, b),
                       "%r and %r are mutually related" % (a, b))

    for w in worlds:
        interp = frame.interp.get(w)
        if interp is None:
            continue
        report.merge(_check_structure(frame, w, interp))
        missing = frame.principals - interp.domain
        if missing:
            report.add("principals-in-domain", (w, tuple(sorted(missing))),
                       "principals %s missing from the domain at %r"
                       % (", ".join(sorted(missing)), w))

    edges = [(a, b, "leq") for (a, b) in frame.leq if a != b]
    for p, rel in sorted((accessibility or {}).items()):
        edges.extend((a, b, "acc:%s" % p) for (a, b) in rel if a != b)
    for (a, b, via) in edges:
        if a in frame.interp and b in frame.interp:
            report.merge(check_growth_edge(frame, a, b, via))

    return report


def _check_structure(frame: ConstructiveFrame, w: str,
                     interp: FirstOrderInterp) -> Report:
    report = Report()
    seen: set[str] = set()
    for block in interp.eq_blocks:
        if not block:
            report.add("equality-partition", (w,), "empty equality block at %r" % w)
        for d in block:
            if d in seen:
                report.add("equality-partition", (w, d),
                           "individual %r in two equality blocks at %r" % (d, w))
            seen.add(d)
            if d not in interp.domain:
                report.add("equality-partition", (w, d),
                           "equality block member %r outside the domain at %r" % (d, w))
    for d in interp.domain - seen:
        report.add("equality-partition", (w, d),
                   "individual %r missing from the equality partition at %r" % (d, w))

    sig = frame.signature
    for name, tuples in sorted(interp.relations.items()):
        arity = sig.relations.get(name)
        if arity is None:
            report.add("relation-declared", (w, name),
                       "relation %r not in the signature" % name)
            continue
        for t in sorted(tuples):
            if len(t) != arity:
                report.add("relation-arity", (w, name, t),
                           "tuple of wrong arity for %r at %r" % (name, w))
            elif any(d not in interp.domain for d in t):
                report.add("relation-in-domain", (w, name, t),
                           "relation %r holds a tuple outside the domain at %r"
                           % (name, w))
        # respect for equality: swapping equals must not change membership
        for t in sorted(tuples):
            if len(t) != arity or any(d not in interp.domain for d in t):
                continue
            for i, d in enumerate(t):
                block = interp.block_of(d) or frozenset()
                for e in sorted(block):
                    t2 = t[:i] + (e,) + t[i + 1:]
                    if t2 not in tuples:
                        report.add("relation-respects-equality", (w, name, t, t2),
                                   "%r holds %r but not the pointwise equal %r at %r"
                                   % (name, t, t2, w))

    for name, arity in sorted(sig.functions.items()):
        table = interp.functions.get(name, {})
        for args in itertools.product(sorted(interp.domain), repeat=arity):
            if args not in table:
                report.add("function-total", (w, name, args),
                           "function %r undefined on %r at %r" % (name, args, w))
                continue
            val = table[args]
            if val not in interp.domain:
                report.add("function-in-domain", (w, name, args, val),
                           "function %r maps %r outside the domain at %r"
                           % (name, args, w))
        for args, val in sorted(table.items()):
            if len(args) != arity:
                report.add("function-arity", (w, name, args),
                           "table row of wrong arity for %r at %r" % (name, w))
                continue
            if any(d not in interp.domain for d in args):
                continue
            # respect for equality on arguments
            for i, d in enumerate(args):
                block = interp.block_of(d) or frozenset()
                for e in sorted(block):
                    args2 = args[:i] + (e,) + args[i + 1:]
                    other = table.get(args2)
                    if other is not None and not interp.equal(val, other):
                        report.add("function-respects-equality",
                                   (w, name, args, args2),
                                   "%r disagrees on equal arguments %r / %r at %r"
                                   % (name, args, args2, w))
    return report


def check_growth_edge(frame: ConstructiveFrame, a: str, b: str, via: str) -> Report:
    """Structure growth clauses (i)-(iv) along one edge a -> b."""
    report = Report()
    ia, ib = frame.interp[a], frame.interp[b]
    cond = "s-monotone-%s" % ("leq" if via == "leq" else "acc")

    lost = ia.domain - ib.domain
    if lost:
        report.add(cond + "(i)", (a, b, tuple(sorted(lost)), via),
                   "domain loses %s along %s -> %s (%s)"
                   % (", ".join(sorted(lost)), a, b, via))

    shared = ia.domain & ib.domain
    for d1 in sorted(shared):
        for d2 in sorted(shared):
            if d1 < d2 and ia.equal(d1, d2) and not ib.equal(d1, d2):
                report.add(cond + "(ii)", (a, b, d1, d2, via),
                           "%r = %r holds at %r but not at %r (%s)"
                           % (d1, d2, a, b, via))

    for name, tuples in sorted(ia.relations.items()):
        later = ib.relations.get(name, frozenset())
        for t in sorted(tuples - later):
            if all(d in ib.domain for d in t):
                report.add(cond + "(iii)", (a, b, name, t, via),
                           "%r%r holds at %r but not at %r (%s)"
                           % (name, t, a, b, via))

    # (iv): on old inputs the later table must agree up to equality at the
    # earlier world, which in particular keeps the output inside the old domain
    for name, arity in sorted(frame.signature.functions.items()):
        ta = ia.functions.get(name, {})
        tb = ib.functions.get(name, {})
        for args in itertools.product(sorted(ia.domain), repeat=arity):
            if args not in ta or args not in tb:
                continue
            va, vb = ta[args], tb[args]
            if not ia.equal(va, vb):
                report.add(cond + "(iv)", (a, b, name, args, va, vb, via),
                           "%r%r is %r at %r but %r at %r, not equal at %r (%s)"
                           % (name, args, va, a, vb, b, a, via))
    return report
