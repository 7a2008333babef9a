"""On-disk formats for models, proofs, probe lists, and corpus manifests.

One s-expression family covers every artifact; formulas and terms embed as
double-quoted strings in the surface syntax.  Loaders validate structure
(declared symbols, arities, world references, principals inside every
domain) and raise FormatError with positions; semantic well-formedness
stays with the checker commands.  A proof file names its rules and
rule arguments only: premise sequents are recomputed top-down from the
root sequent, so a file cannot smuggle in premises its rule would not
license.  Rule-level failures raise ProofRejected, which verdict-style
callers treat as a rejection rather than a malformed file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .belief import BeliefModel, ExtensionalWorldviews
from .kripke import KripkeModel
from .models import ConstructiveFrame, FirstOrderInterp, make_interp
from .proofs import (ARG_FIELDS, EMPTY_ARGS, Derivation, RuleArgs, RuleError,
                     Sequent, expected_premises)
from .sexpr import (Integer, Node, NodeList, SexprError, String, Symbol,
                    format_node, parse_nodes, quote_string)
from .syntax import (Formula, FormulaSet, ParseError, Signature,
                     SignatureError, parse_formula, parse_term, print_formula,
                     print_term)

Pairs = frozenset[tuple[str, str]]


class FormatError(Exception):
    def __init__(self, message: str, node: Node | None = None,
                 source: str = ""):
        line = getattr(node, "line", 0)
        col = getattr(node, "col", 0)
        where = "%s:%d:%d" % (source or "<input>", line, col)
        super().__init__("%s: %s" % (where, message))
        self.message = message
        self.line = line
        self.col = col
        self.source = source


class ProofRejected(FormatError):
    """The file parses but its derivation does not exist: an unknown rule,
    a rule schema the conclusion does not fit, or a premise-count
    mismatch."""


# --------------------------------------------------------------------------
# node helpers


def _sym(node: Node, what: str, source: str) -> str:
    if not isinstance(node, Symbol):
        raise FormatError("expected %s, found %s"
                          % (what, type(node).__name__.lower()), node, source)
    return node.name


def _string(node: Node, what: str, source: str) -> str:
    if not isinstance(node, String):
        raise FormatError("expected a quoted %s" % what, node, source)
    return node.value


def _list(node: Node, what: str, source: str) -> NodeList:
    if not isinstance(node, NodeList):
        raise FormatError("expected %s" % what, node, source)
    return node


def _headed(node: Node, source: str) -> tuple[str, NodeList]:
    lst = _list(node, "a parenthesized block", source)
    head = lst.head()
    if head is None:
        raise FormatError("block must start with a symbol", node, source)
    return head, lst


def _blocks(items, source: str) -> dict[str, list[NodeList]]:
    out: dict[str, list[NodeList]] = {}
    for item in items:
        head, lst = _headed(item, source)
        out.setdefault(head, []).append(lst)
    return out


def _one_block(blocks: dict[str, list[NodeList]], name: str, parent: Node,
               source: str) -> NodeList:
    got = blocks.get(name, [])
    if len(got) != 1:
        raise FormatError("expected exactly one (%s ...) block, found %d"
                          % (name, len(got)), parent, source)
    return got[0]


def _parse_embedded(kind: str, text_node: Node, sig: Signature, source: str):
    text = _string(text_node, "%s string" % kind, source)
    parse = parse_term if kind == "term" else parse_formula
    try:
        return parse(text, sig)
    except (ParseError, SignatureError) as e:
        raise FormatError("in embedded %s %s: %s"
                          % (kind, quote_string(text), e),
                          text_node, source) from None


# --------------------------------------------------------------------------
# signatures


def _load_signature(block: NodeList, source: str) -> Signature:
    functions: dict[str, int] = {}
    relations: dict[str, int] = {}
    principal_names: list[str] = []
    for item in block.items[1:]:
        head, lst = _headed(item, source)
        if head in ("fun", "rel"):
            if len(lst) != 3:
                raise FormatError("(%s name arity) takes two parts" % head,
                                  lst, source)
            name = _sym(lst[1], "a symbol name", source)
            if not isinstance(lst[2], Integer) or lst[2].value < 0:
                raise FormatError("arity must be a non-negative integer",
                                  lst[2], source)
            table = functions if head == "fun" else relations
            if name in functions or name in relations:
                raise FormatError("symbol %r declared twice" % name,
                                  lst, source)
            table[name] = lst[2].value
        elif head == "principal-names":
            principal_names.extend(_sym(n, "a principal name symbol", source)
                                   for n in lst.items[1:])
        else:
            raise FormatError("unknown signature block (%s ...)" % head,
                              item, source)
    try:
        return Signature(functions, relations, frozenset(principal_names))
    except SignatureError as e:
        raise FormatError(str(e), block, source) from None


def _save_signature(sig: Signature) -> NodeList:
    items: list[Node] = [Symbol("signature")]
    for name in sorted(sig.functions):
        items.append(NodeList((Symbol("fun"), Symbol(name),
                               Integer(sig.functions[name]))))
    for name in sorted(sig.relations):
        items.append(NodeList((Symbol("rel"), Symbol(name),
                               Integer(sig.relations[name]))))
    if sig.principals:
        items.append(NodeList((Symbol("principal-names"),
                               *(Symbol(p) for p in sorted(sig.principals)))))
    return NodeList(tuple(items))


# --------------------------------------------------------------------------
# models


def _load_tuple(node: Node, domain: frozenset[str], arity: int, what: str,
                source: str) -> tuple[str, ...]:
    lst = _list(node, "an argument tuple for %s" % what, source)
    args = tuple(_sym(a, "a domain element", source) for a in lst.items)
    if len(args) != arity:
        raise FormatError("%s takes %d argument(s), tuple has %d"
                          % (what, arity, len(args)), node, source)
    for a in args:
        if a not in domain:
            raise FormatError("%r is not in this world's domain" % a,
                              node, source)
    return args


def _load_world(block: NodeList, sig: Signature,
                source: str) -> tuple[str, FirstOrderInterp]:
    if len(block) < 2:
        raise FormatError("(world name ...) needs a world name", block, source)
    wname = _sym(block[1], "a world name", source)
    blocks = _blocks(block.items[2:], source)
    unknown = set(blocks) - {"domain", "eq", "rel", "fun"}
    if unknown:
        raise FormatError("unknown world block (%s ...)"
                          % sorted(unknown)[0], block, source)
    dom_block = _one_block(blocks, "domain", block, source)
    domain = frozenset(_sym(d, "a domain element", source)
                       for d in dom_block.items[1:])
    if not domain:
        raise FormatError("domain must not be empty", dom_block, source)
    eq_blocks = []
    for eq in blocks.get("eq", []):
        for part in eq.items[1:]:
            lst = _list(part, "an equality block", source)
            members = frozenset(_sym(m, "a domain element", source)
                                for m in lst.items)
            for m in members:
                if m not in domain:
                    raise FormatError("%r is not in this world's domain" % m,
                                      part, source)
            if len(members) > 1:
                eq_blocks.append(members)
    relations: dict[str, set[tuple[str, ...]]] = {}
    for rel in blocks.get("rel", []):
        if len(rel) < 2:
            raise FormatError("(rel name tuples...) needs a name", rel, source)
        name = _sym(rel[1], "a relation symbol", source)
        if name not in sig.relations:
            raise FormatError("relation %r is not declared" % name,
                              rel, source)
        tuples = relations.setdefault(name, set())
        for t in rel.items[2:]:
            tuples.add(_load_tuple(t, domain, sig.relations[name],
                                   "relation %r" % name, source))
    functions: dict[str, dict[tuple[str, ...], str]] = {}
    for fun in blocks.get("fun", []):
        if len(fun) < 2:
            raise FormatError("(fun name entries...) needs a name",
                              fun, source)
        name = _sym(fun[1], "a function symbol", source)
        if name not in sig.functions:
            raise FormatError("function %r is not declared" % name,
                              fun, source)
        arity = sig.functions[name]
        table = functions.setdefault(name, {})
        rest = fun.items[2:]
        if arity == 0 and len(rest) == 1 and isinstance(rest[0], Symbol):
            # nullary sugar: (fun P p)
            value = rest[0].name
            if value not in domain:
                raise FormatError("%r is not in this world's domain" % value,
                                  rest[0], source)
            table[()] = value
            continue
        for entry in rest:
            lst = _list(entry, "a ((args...) value) entry", source)
            if len(lst) != 2:
                raise FormatError("function entry must be ((args...) value)",
                                  entry, source)
            args = _load_tuple(lst[0], domain, arity,
                               "function %r" % name, source)
            value = _sym(lst[1], "a domain element", source)
            if value not in domain:
                raise FormatError("%r is not in this world's domain" % value,
                                  lst[1], source)
            table[args] = value
    return wname, make_interp(domain, eq_blocks, relations, functions)


def _load_pairs(block: NodeList, worlds: tuple[str, ...], what: str,
                source: str) -> set[tuple[str, str]]:
    out = set()
    for item in block.items[1:]:
        lst = _list(item, "a (from to) pair", source)
        if len(lst) != 2:
            raise FormatError("%s pairs have exactly two worlds" % what,
                              item, source)
        a = _sym(lst[0], "a world name", source)
        b = _sym(lst[1], "a world name", source)
        for w in (a, b):
            if w not in worlds:
                raise FormatError("unknown world %r" % w, item, source)
        out.add((a, b))
    return out


def loads_model(text: str, source: str = "<input>"):
    """Parse a model document; KripkeModel or BeliefModel by its kind tag."""
    try:
        nodes = parse_nodes(text, source)
    except SexprError as e:
        raise FormatError(e.message, Symbol("", e.line, e.col),
                          source) from None
    if len(nodes) != 1:
        raise FormatError("a model file holds exactly one (model ...) form",
                          nodes[1] if nodes else None, source)
    head, doc = _headed(nodes[0], source)
    if head != "model":
        raise FormatError("expected a (model ...) form, found (%s ...)"
                          % head, nodes[0], source)
    blocks = _blocks(doc.items[1:], source)
    unknown = set(blocks) - {"kind", "signature", "worlds", "leq", "world",
                             "principals", "acc", "worldview"}
    if unknown:
        raise FormatError("unknown model block (%s ...)" % sorted(unknown)[0],
                          doc, source)

    kind_block = _one_block(blocks, "kind", doc, source)
    if len(kind_block) != 2:
        raise FormatError("(kind ...) takes one tag", kind_block, source)
    kind = _sym(kind_block[1], "a model kind", source)
    if kind not in ("kripke", "belief-extensional"):
        raise FormatError("kind must be kripke or belief-extensional, "
                          "not %r" % kind, kind_block, source)

    sig = _load_signature(_one_block(blocks, "signature", doc, source), source)

    worlds_block = _one_block(blocks, "worlds", doc, source)
    worlds = tuple(_sym(w, "a world name", source)
                   for w in worlds_block.items[1:])
    if not worlds:
        raise FormatError("a model needs at least one world",
                          worlds_block, source)
    if len(set(worlds)) != len(worlds):
        raise FormatError("duplicate world name", worlds_block, source)

    leq = {(w, w) for w in worlds}
    for block in blocks.get("leq", []):
        leq |= _load_pairs(block, worlds, "leq", source)

    interp: dict[str, FirstOrderInterp] = {}
    for block in blocks.get("world", []):
        wname, world_interp = _load_world(block, sig, source)
        if wname not in worlds:
            raise FormatError("unknown world %r" % wname, block, source)
        if wname in interp:
            raise FormatError("world %r described twice" % wname,
                              block, source)
        interp[wname] = world_interp
    missing = [w for w in worlds if w not in interp]
    if missing:
        raise FormatError("world %r has no (world ...) block" % missing[0],
                          doc, source)

    principals: list[str] = []
    named: dict[str, str] = {}
    pr_block = _one_block(blocks, "principals", doc, source)
    for item in pr_block.items[1:]:
        if isinstance(item, Symbol):
            principals.append(item.name)
            continue
        lst = _list(item, "a (individual name?) entry", source)
        if not (1 <= len(lst) <= 2):
            raise FormatError("principal entry is (individual) or "
                              "(individual name-constant)", item, source)
        ind = _sym(lst[0], "a principal individual", source)
        principals.append(ind)
        if len(lst) == 2:
            named[ind] = _sym(lst[1], "a name constant", source)
    if len(set(principals)) != len(principals):
        raise FormatError("duplicate principal", pr_block, source)
    for p in principals:
        for w in worlds:
            if p not in interp[w].domain:
                raise FormatError(
                    "principal %r is missing from the domain at world %r; "
                    "principals must belong to every world's domain"
                    % (p, w), pr_block, source)
    for ind, name in named.items():
        if sig.functions.get(name) != 0:
            raise FormatError("name constant %r is not a declared nullary "
                              "function" % name, pr_block, source)
        for w in worlds:
            if interp[w].functions.get(name, {}).get(()) != ind:
                raise FormatError(
                    "name constant %r does not denote %r at world %r"
                    % (name, ind, w), pr_block, source)

    frame = ConstructiveFrame(worlds=worlds, leq=frozenset(leq),
                              interp=interp,
                              principals=frozenset(principals),
                              signature=sig)

    if kind == "kripke":
        if "worldview" in blocks:
            raise FormatError("a kripke model has no (worldview ...) blocks",
                              blocks["worldview"][0], source)
        accessibility: dict[str, Pairs] = {}
        for block in blocks.get("acc", []):
            if len(block) < 2:
                raise FormatError("(acc individual pairs...) needs an "
                                  "individual", block, source)
            ind = _sym(block[1], "a principal individual", source)
            if ind not in frame.principals:
                raise FormatError("%r is not a declared principal" % ind,
                                  block, source)
            if ind in accessibility:
                raise FormatError("accessibility for %r given twice" % ind,
                                  block, source)
            pairs = set()
            for item in block.items[2:]:
                lst = _list(item, "a (from to) pair", source)
                if len(lst) != 2:
                    raise FormatError("accessibility pairs have exactly two "
                                      "worlds", item, source)
                a = _sym(lst[0], "a world name", source)
                b = _sym(lst[1], "a world name", source)
                for w in (a, b):
                    if w not in worlds:
                        raise FormatError("unknown world %r" % w, item,
                                          source)
                pairs.add((a, b))
            accessibility[ind] = frozenset(pairs)
        return KripkeModel(frame, accessibility)

    if "acc" in blocks:
        raise FormatError("a belief-extensional model has no (acc ...) "
                          "blocks", blocks["acc"][0], source)
    table: dict[tuple[str, str], FormulaSet] = {}
    for block in blocks.get("worldview", []):
        if len(block) < 3:
            raise FormatError("(worldview world individual formulas...) "
                              "needs a world and an individual", block, source)
        w = _sym(block[1], "a world name", source)
        if w not in worlds:
            raise FormatError("unknown world %r" % w, block, source)
        ind = _sym(block[2], "a principal individual", source)
        if ind not in frame.principals:
            raise FormatError("%r is not a declared principal" % ind,
                              block, source)
        if (w, ind) in table:
            raise FormatError("worldview for %r at %r given twice"
                              % (ind, w), block, source)
        table[(w, ind)] = FormulaSet(
            _parse_embedded("formula", f, sig, source)
            for f in block.items[3:])
    return BeliefModel(frame, ExtensionalWorldviews(table))


def load_model(path: str):
    with open(path, encoding="utf-8") as f:
        return loads_model(f.read(), path)


def _save_world(wname: str, interp: FirstOrderInterp) -> NodeList:
    items: list[Node] = [Symbol("world"), Symbol(wname),
                         NodeList((Symbol("domain"),
                                   *(Symbol(d)
                                     for d in sorted(interp.domain))))]
    merged = [b for b in interp.eq_blocks if len(b) > 1]
    if merged:
        items.append(NodeList((Symbol("eq"),
                               *(NodeList(tuple(Symbol(m)
                                                for m in sorted(b)))
                                 for b in merged))))
    for name in sorted(interp.relations):
        tuples = sorted(interp.relations[name])
        items.append(NodeList((Symbol("rel"), Symbol(name),
                               *(NodeList(tuple(Symbol(a) for a in t))
                                 for t in tuples))))
    for name in sorted(interp.functions):
        table = interp.functions[name]
        if set(table) == {()}:
            items.append(NodeList((Symbol("fun"), Symbol(name),
                                   Symbol(table[()]))))
            continue
        entries = [NodeList((NodeList(tuple(Symbol(a) for a in args)),
                             Symbol(value)))
                   for args, value in sorted(table.items())]
        items.append(NodeList((Symbol("fun"), Symbol(name), *entries)))
    return NodeList(tuple(items))


def save_model(model) -> str:
    """Serialize a KripkeModel or an extensional BeliefModel; the result
    reloads to a structurally equal model."""
    if isinstance(model, KripkeModel):
        kind = "kripke"
        frame = model.frame
    elif isinstance(model, BeliefModel):
        if not isinstance(model.worldviews, ExtensionalWorldviews):
            raise ValueError("derived worldviews have no finite table; "
                             "materialize them over a probe set first")
        kind = "belief-extensional"
        frame = model.frame
    else:
        raise TypeError("not a serializable model: %r" % type(model).__name__)

    items: list[Node] = [Symbol("model"),
                         NodeList((Symbol("kind"), Symbol(kind))),
                         _save_signature(frame.signature),
                         NodeList((Symbol("worlds"),
                                   *(Symbol(w) for w in frame.worlds)))]
    strict = sorted((a, b) for (a, b) in frame.leq if a != b)
    if strict:
        items.append(NodeList((Symbol("leq"),
                               *(NodeList((Symbol(a), Symbol(b)))
                                 for a, b in strict))))
    for w in frame.worlds:
        items.append(_save_world(w, frame.interp[w]))

    names: dict[str, str] = {}
    for sym in sorted(frame.signature.principals):
        tables = [frame.interp[w].functions.get(sym, {}) for w in frame.worlds]
        values = {t.get(()) for t in tables}
        if len(values) == 1:
            value = values.pop()
            if value in frame.principals and value not in names:
                names[value] = sym
    entries = [NodeList((Symbol(p), Symbol(names[p]))) if p in names
               else NodeList((Symbol(p),))
               for p in sorted(frame.principals)]
    items.append(NodeList((Symbol("principals"), *entries)))

    if kind == "kripke":
        for ind in sorted(model.accessibility):
            pairs = sorted(model.accessibility[ind])
            items.append(NodeList((Symbol("acc"), Symbol(ind),
                                   *(NodeList((Symbol(a), Symbol(b)))
                                     for a, b in pairs))))
    else:
        for (w, ind) in sorted(model.worldviews.table):
            formulas = sorted(print_formula(phi)
                              for phi in model.worldviews.table[(w, ind)])
            items.append(NodeList((Symbol("worldview"), Symbol(w),
                                   Symbol(ind),
                                   *(String(s) for s in formulas))))
    return format_node(NodeList(tuple(items))) + "\n"


# --------------------------------------------------------------------------
# proofs


_ARG_KEYWORDS = ("cut", "formula", "term", "mid", "var")


def _load_args(forms: list[NodeList], sig: Signature, rule_node: Node,
               source: str) -> RuleArgs:
    values: dict[str, object] = {}
    for form in forms:
        head = form.head()
        if len(form) != 2:
            raise FormatError("(%s ...) takes exactly one value"
                              % head, form, source)
        if head in values:
            raise FormatError("argument %r given twice" % head, form, source)
        if head in ("cut", "formula"):
            values[head] = _parse_embedded("formula", form[1], sig, source)
        elif head in ("term", "mid"):
            values[head] = _parse_embedded("term", form[1], sig, source)
        else:
            values[head] = _sym(form[1], "a variable name", source)
    if not values:
        return EMPTY_ARGS
    return RuleArgs(**values)


def _build_derivation(node: Node, conclusion: Sequent, sig: Signature,
                      source: str) -> Derivation:
    lst = _list(node, "a (rule-name ...) step", source)
    rule = lst.head()
    if rule is None:
        raise FormatError("a step must start with a rule name", node, source)
    arg_forms: list[NodeList] = []
    premise_nodes: list[Node] = []
    for item in lst.items[1:]:
        head, sub = _headed(item, source)
        if head in _ARG_KEYWORDS:
            arg_forms.append(sub)
        else:
            premise_nodes.append(item)
    args = _load_args(arg_forms, sig, node, source)
    try:
        premises = expected_premises(rule, conclusion, args)
    except RuleError as e:
        raise ProofRejected("at sequent [%s]: %s" % (conclusion, e),
                            node, source) from None
    if len(premises) != len(premise_nodes):
        raise ProofRejected(
            "rule %s needs %d premise step(s) here, file gives %d"
            % (rule, len(premises), len(premise_nodes)), node, source)
    children = tuple(_build_derivation(child, want, sig, source)
                     for child, want in zip(premise_nodes, premises))
    return Derivation(rule, conclusion, children, args)


def loads_proof(text: str, source: str = "<input>"
                ) -> tuple[Derivation, Sequent]:
    """Parse a proof document into a Derivation and its declared goal.

    The file gives the root sequent, then a tree of rule names with rule
    arguments; every premise sequent is computed by the rule schemas."""
    try:
        nodes = parse_nodes(text, source)
    except SexprError as e:
        raise FormatError(e.message, Symbol("", e.line, e.col),
                          source) from None
    if len(nodes) != 1:
        raise FormatError("a proof file holds exactly one (proof ...) form",
                          nodes[1] if nodes else None, source)
    head, doc = _headed(nodes[0], source)
    if head != "proof":
        raise FormatError("expected a (proof ...) form, found (%s ...)"
                          % head, nodes[0], source)
    blocks = _blocks(doc.items[1:], source)
    unknown = set(blocks) - {"signature", "context", "goal", "derivation"}
    if unknown:
        raise FormatError("unknown proof block (%s ...)" % sorted(unknown)[0],
                          doc, source)
    sig = _load_signature(_one_block(blocks, "signature", doc, source), source)
    hyps = []
    for block in blocks.get("context", []):
        hyps.extend(_parse_embedded("formula", f, sig, source)
                    for f in block.items[1:])
    goal_block = _one_block(blocks, "goal", doc, source)
    if len(goal_block) != 2:
        raise FormatError("(goal ...) takes one formula string",
                          goal_block, source)
    goal = _parse_embedded("formula", goal_block[1], sig, source)
    root = Sequent(FormulaSet(hyps), goal)
    deriv_block = _one_block(blocks, "derivation", doc, source)
    if len(deriv_block) != 2:
        raise FormatError("(derivation ...) takes one step", deriv_block,
                          source)
    derivation = _build_derivation(deriv_block[1], root, sig, source)
    return derivation, root


def load_proof(path: str) -> tuple[Derivation, Sequent]:
    with open(path, encoding="utf-8") as f:
        return loads_proof(f.read(), path)


def _save_step(node: Derivation) -> NodeList:
    items: list[Node] = [Symbol(node.rule)]
    for field in ARG_FIELDS.get(node.rule, ()):
        value = getattr(node.args, field)
        if field in ("cut", "formula"):
            rendered: Node = String(print_formula(value))
        elif field in ("term", "mid"):
            rendered = String(print_term(value))
        else:
            rendered = Symbol(value)
        items.append(NodeList((Symbol(field), rendered)))
    items.extend(_save_step(p) for p in node.premises)
    return NodeList(tuple(items))


def save_proof(derivation: Derivation, sig: Signature) -> str:
    """Serialize a derivation; reloading rebuilds an equal tree."""
    items: list[Node] = [Symbol("proof"), _save_signature(sig)]
    hyps = sorted(print_formula(f) for f in derivation.conclusion.context)
    if hyps:
        items.append(NodeList((Symbol("context"),
                               *(String(h) for h in hyps))))
    items.append(NodeList((Symbol("goal"),
                           String(print_formula(derivation.conclusion.goal)))))
    items.append(NodeList((Symbol("derivation"), _save_step(derivation))))
    return format_node(NodeList(tuple(items))) + "\n"


# --------------------------------------------------------------------------
# probe lists


def loads_probes(text: str, sig: Signature,
                 source: str = "<input>") -> list[Formula]:
    try:
        nodes = parse_nodes(text, source)
    except SexprError as e:
        raise FormatError(e.message, Symbol("", e.line, e.col),
                          source) from None
    if len(nodes) != 1:
        raise FormatError("a probe file holds exactly one (probes ...) form",
                          nodes[1] if nodes else None, source)
    head, doc = _headed(nodes[0], source)
    if head != "probes":
        raise FormatError("expected a (probes ...) form, found (%s ...)"
                          % head, nodes[0], source)
    return [_parse_embedded("formula", f, sig, source)
            for f in doc.items[1:]]


def load_probes(path: str, sig: Signature) -> list[Formula]:
    with open(path, encoding="utf-8") as f:
        return loads_probes(f.read(), sig, path)


def save_probes(probes) -> str:
    items: list[Node] = [Symbol("probes")]
    items.extend(String(print_formula(phi)) for phi in probes)
    return format_node(NodeList(tuple(items))) + "\n"


# --------------------------------------------------------------------------
# corpus manifests


@dataclass(frozen=True)
class CorpusEntry:
    label: str
    verdict: str
    path: str
    check: str | None = None
    note: str | None = None


def loads_corpus(text: str, base_dir: str,
                 source: str = "<input>") -> list[CorpusEntry]:
    try:
        nodes = parse_nodes(text, source)
    except SexprError as e:
        raise FormatError(e.message, Symbol("", e.line, e.col),
                          source) from None
    if len(nodes) != 1:
        raise FormatError("a corpus manifest holds exactly one "
                          "(corpus ...) form", nodes[1] if nodes else None,
                          source)
    head, doc = _headed(nodes[0], source)
    if head != "corpus":
        raise FormatError("expected a (corpus ...) form, found (%s ...)"
                          % head, nodes[0], source)
    entries: list[CorpusEntry] = []
    seen: set[str] = set()
    for item in doc.items[1:]:
        head, lst = _headed(item, source)
        if head != "entry":
            raise FormatError("unknown corpus block (%s ...)" % head,
                              item, source)
        if len(lst) < 4:
            raise FormatError("(entry label verdict (file ...) ...) needs "
                              "a label, a verdict, and a file", item, source)
        label = _sym(lst[1], "an entry label", source)
        if label in seen:
            raise FormatError("duplicate corpus label %r" % label,
                              item, source)
        seen.add(label)
        verdict = _sym(lst[2], "accept or reject", source)
        if verdict not in ("accept", "reject"):
            raise FormatError("verdict must be accept or reject, not %r"
                              % verdict, lst[2], source)
        path = None
        check = None
        note = None
        for part in lst.items[3:]:
            phead, plst = _headed(part, source)
            if len(plst) != 2:
                raise FormatError("(%s ...) takes one value" % phead,
                                  part, source)
            if phead == "file":
                path = os.path.join(base_dir,
                                    _string(plst[1], "file path", source))
            elif phead == "check":
                check = _string(plst[1], "formula", source)
            elif phead == "note":
                note = _string(plst[1], "note", source)
            else:
                raise FormatError("unknown entry block (%s ...)" % phead,
                                  part, source)
        if path is None:
            raise FormatError("entry %r has no (file ...) block" % label,
                              item, source)
        entries.append(CorpusEntry(label, verdict, path, check, note))
    return entries


def load_corpus(path: str) -> list[CorpusEntry]:
    with open(path, encoding="utf-8") as f:
        return loads_corpus(f.read(), os.path.dirname(path), path)
