"""Paradigm grammars: non-recursive CFGs that render condition-paired sentences.

Grammar file syntax (one directive or rule per line, ``#`` comments allowed):

    name atb
    start S
    condition +filler+gap  GAP=+  grammatical
    condition +filler-gap  GAP=-  ungrammatical
    criterion +filler+gap > +filler-gap

    <S> -> <PREAMBLE> <FILLER> <GAP> ~<SPILLOVER>
    <ADV2> -> 'soon' | 'today' | 'now'
    <+GAP> -> <LINK> <NAME2> <VP2> *<ADV2>
    <-GAP> -> <LINK> <NAME2> <VP2> *<OBJ> <ADV2>

Rule right-hand sides are ``|``-separated alternatives; each alternative is a
sequence of quoted terminals (single or double quotes; multi-word literals
split into tokens) and ``<NAME>`` nonterminal references. A reference to a
condition dimension (``<GAP>`` above) is a slot that resolves to the variant
nonterminal (``<+GAP>`` / ``<-GAP>``) selected by the active condition. An
empty alternative is epsilon. A leading ``[w]`` sets a sampling weight
(default 1, i.e. uniform). Repeated rule lines for one nonterminal append
alternatives.

Markers:
  ``*sym``  the critical region: exactly one per sentence, exactly one token;
            the compared conditions must agree on everything before it and
            differ at it, for every choice of expansions.
  ``~sym``  the spillover region: optional, must follow the critical region
            and run to the end of the sentence.

Every minimal-pair record fixes one expansion per nonterminal, shared by all
conditions, so the members of a pair differ only in condition material.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterator

from .corpus import Sentence


class GrammarError(Exception):
    """Raised for unparsable or structurally invalid grammars."""


@dataclass(frozen=True)
class Sym:
    """One right-hand-side element: a terminal literal or a nonterminal reference."""

    text: str
    nonterminal: bool
    critical: bool = False
    spillover: bool = False


@dataclass(frozen=True)
class Alternative:
    symbols: tuple[Sym, ...]
    weight: float = 1.0


@dataclass(frozen=True)
class Condition:
    """One cell of the paradigm: a label, slot assignments, and a grammaticality flag."""

    label: str
    variants: tuple[tuple[str, str], ...]  # (dimension, "+" or "-") pairs
    grammatical: bool

    def variant_of(self, dimension: str) -> str:
        for dim, sign in self.variants:
            if dim == dimension:
                return sign
        raise GrammarError(f"condition {self.label!r} does not assign dimension {dimension!r}")


@dataclass(frozen=True)
class GrammarSpec:
    name: str
    start: str
    rules: dict[str, tuple[Alternative, ...]]
    conditions: tuple[Condition, ...]
    criterion: tuple[str, str] | None  # (grammatical label, ungrammatical label)

    @property
    def dimensions(self) -> tuple[str, ...]:
        dims: list[str] = []
        for cond in self.conditions:
            for dim, _ in cond.variants:
                if dim not in dims:
                    dims.append(dim)
        return tuple(dims)

    def condition(self, label: str) -> Condition:
        for cond in self.conditions:
            if cond.label == label:
                return cond
        raise GrammarError(f"unknown condition {label!r} in grammar {self.name!r}")

    def is_slot(self, name: str) -> bool:
        return name not in self.rules and name in self.dimensions


@dataclass(frozen=True)
class ParadigmInstance:
    """One rendered sentence for one condition of a record."""

    condition: str
    tokens: Sentence
    critical_span: tuple[int, int]
    spillover_span: tuple[int, int] | None
    grammatical: bool

    @property
    def critical_index(self) -> int:
        return self.critical_span[0]

    @property
    def critical_token(self) -> str:
        return self.tokens[self.critical_span[0]]

    def to_line(self, capitalize: bool = True) -> str:
        """Render as a text line; capitalization is cosmetic and never stored."""
        line = " ".join(self.tokens)
        if capitalize and line:
            line = line[0].upper() + line[1:]
        return line


@dataclass
class MinimalPairRecord:
    """All condition cells rendered from one shared choice of expansions."""

    phenomenon: str
    seed: int
    instances: dict[str, ParadigmInstance]
    shared_choices: dict[str, int]
    criterion: tuple[str, str] | None

    def instance(self, label: str) -> ParadigmInstance:
        try:
            return self.instances[label]
        except KeyError:
            raise GrammarError(f"record has no condition {label!r}") from None

    def pair(self) -> tuple[ParadigmInstance, ParadigmInstance]:
        """The (grammatical, ungrammatical) instances compared by the criterion."""
        if self.criterion is None:
            raise GrammarError(f"grammar {self.phenomenon!r} declares no criterion pair")
        good, bad = self.criterion
        return self.instance(good), self.instance(bad)


# --- parsing ---------------------------------------------------------------

_NT_RE = re.compile(r"[A-Za-z0-9_+-]+")


def _strip_comment(line: str) -> str:
    out = []
    quote: str | None = None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            break
        out.append(ch)
    return "".join(out)


def _scan_symbols(text: str, where: str) -> tuple[list[Sym | str], float]:
    """Tokenize one alternative into Syms; '|' never reaches here. Returns (syms, weight)."""
    syms: list[Sym] = []
    weight = 1.0
    i = 0
    n = len(text)
    first = True
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "[" and first:
            end = text.find("]", i)
            if end < 0:
                raise GrammarError(f"{where}: unterminated weight bracket")
            try:
                weight = float(text[i + 1 : end])
            except ValueError:
                raise GrammarError(f"{where}: bad weight {text[i + 1:end]!r}") from None
            if weight <= 0:
                raise GrammarError(f"{where}: weight must be positive")
            i = end + 1
            first = False
            continue
        first = False
        critical = spillover = False
        while ch in "*~":
            if ch == "*":
                critical = True
            else:
                spillover = True
            i += 1
            if i >= n:
                raise GrammarError(f"{where}: dangling marker")
            ch = text[i]
        if ch in "'\"":
            end = text.find(ch, i + 1)
            if end < 0:
                raise GrammarError(f"{where}: unterminated quote")
            literal = text[i + 1 : end]
            if not literal.strip():
                raise GrammarError(f"{where}: empty terminal literal")
            syms.append(Sym(literal, nonterminal=False, critical=critical, spillover=spillover))
            i = end + 1
        elif ch == "<":
            end = text.find(">", i)
            if end < 0:
                raise GrammarError(f"{where}: unterminated nonterminal")
            name = text[i + 1 : end]
            if not _NT_RE.fullmatch(name):
                raise GrammarError(f"{where}: bad nonterminal name {name!r}")
            syms.append(Sym(name, nonterminal=True, critical=critical, spillover=spillover))
            i = end + 1
        else:
            raise GrammarError(f"{where}: unexpected character {ch!r}")
    return syms, weight


def _split_alternatives(text: str, where: str) -> list[str]:
    parts: list[str] = []
    quote: str | None = None
    current: list[str] = []
    for ch in text:
        if quote:
            if ch == quote:
                quote = None
            current.append(ch)
        elif ch in "'\"":
            quote = ch
            current.append(ch)
        elif ch == "|":
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if quote:
        raise GrammarError(f"{where}: unterminated quote")
    parts.append("".join(current))
    return parts


def parse_grammar(text: str, name: str = "custom") -> GrammarSpec:
    """Parse and validate grammar source. Errors carry the offending line number."""
    start: str | None = None
    rules: dict[str, list[Alternative]] = {}
    conditions: list[Condition] = []
    criterion: tuple[str, str] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        where = f"line {lineno}"
        if "->" in line:
            lhs_text, rhs_text = line.split("->", 1)
            lhs_text = lhs_text.strip()
            m = re.fullmatch(r"<([A-Za-z0-9_+-]+)>|([A-Za-z0-9_+-]+)", lhs_text)
            if not m:
                raise GrammarError(f"{where}: bad rule left-hand side {lhs_text!r}")
            lhs = m.group(1) or m.group(2)
            alternatives = rules.setdefault(lhs, [])
            for alt_text in _split_alternatives(rhs_text, where):
                syms, weight = _scan_symbols(alt_text, where)
                alternatives.append(Alternative(tuple(syms), weight))
            continue

        parts = line.split()
        keyword = parts[0]
        if keyword == "name":
            if len(parts) != 2:
                raise GrammarError(f"{where}: usage: name NAME")
            name = parts[1]
        elif keyword == "start":
            if len(parts) != 2:
                raise GrammarError(f"{where}: usage: start NONTERMINAL")
            start = parts[1].strip("<>")
        elif keyword == "condition":
            if len(parts) < 4:
                raise GrammarError(f"{where}: usage: condition LABEL DIM=+/- ... grammatical|ungrammatical")
            label = parts[1]
            flag = parts[-1]
            if flag not in ("grammatical", "ungrammatical"):
                raise GrammarError(f"{where}: condition must end with grammatical or ungrammatical")
            variants: list[tuple[str, str]] = []
            for assign in parts[2:-1]:
                m = re.fullmatch(r"([A-Za-z0-9_]+)=([+-])", assign)
                if not m:
                    raise GrammarError(f"{where}: bad dimension assignment {assign!r}")
                variants.append((m.group(1), m.group(2)))
            if any(label == c.label for c in conditions):
                raise GrammarError(f"{where}: duplicate condition label {label!r}")
            conditions.append(Condition(label, tuple(variants), flag == "grammatical"))
        elif keyword == "criterion":
            m = re.fullmatch(r"criterion\s+(\S+)\s*>\s*(\S+)", line)
            if not m:
                raise GrammarError(f"{where}: usage: criterion GOOD_LABEL > BAD_LABEL")
            criterion = (m.group(1), m.group(2))
        else:
            raise GrammarError(f"{where}: unrecognized line {line!r}")

    if not rules:
        raise GrammarError("grammar has no rules")
    if start is None:
        start = next(iter(rules))
    grammar = GrammarSpec(
        name=name,
        start=start,
        rules={nt: tuple(alts) for nt, alts in rules.items()},
        conditions=tuple(conditions),
        criterion=criterion,
    )
    validate_grammar(grammar)
    return grammar


def load_grammar(path, name: str | None = None) -> GrammarSpec:
    from pathlib import Path

    path = Path(path)
    return parse_grammar(path.read_text(encoding="utf-8"), name or path.stem)


# --- validation ------------------------------------------------------------


def _referenced_nonterminals(grammar: GrammarSpec, nt: str) -> set[str]:
    refs: set[str] = set()
    for alt in grammar.rules.get(nt, ()):
        for sym in alt.symbols:
            if sym.nonterminal:
                refs.add(sym.text)
    return refs


def _slot_variants(grammar: GrammarSpec, slot: str) -> list[str]:
    signs = {cond.variant_of(slot) for cond in grammar.conditions}
    return [f"{sign}{slot}" for sign in sorted(signs)]


def _check_references_and_recursion(grammar: GrammarSpec) -> None:
    dims = set(grammar.dimensions)
    # Each condition must assign every dimension, so slots resolve everywhere.
    for cond in grammar.conditions:
        assigned = {dim for dim, _ in cond.variants}
        if assigned != dims:
            missing = dims - assigned
            raise GrammarError(
                f"condition {cond.label!r} does not assign dimension(s) {sorted(missing)}"
            )
        for dim, sign in cond.variants:
            variant = f"{sign}{dim}"
            if variant not in grammar.rules:
                raise GrammarError(
                    f"condition {cond.label!r} needs rule <{variant}> which is not defined"
                )

    def successors(nt: str) -> list[str]:
        if grammar.is_slot(nt):
            return _slot_variants(grammar, nt)
        if nt not in grammar.rules:
            raise GrammarError(f"reference to undefined nonterminal <{nt}>")
        return sorted(_referenced_nonterminals(grammar, nt))

    # Iterative DFS cycle check; the language must be finite.
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    for root in [grammar.start, *grammar.rules]:
        if color.get(root, WHITE) == BLACK:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(successors(root)))]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                c = color.get(nxt, WHITE)
                if c == GRAY:
                    raise GrammarError(f"grammar is recursive through <{nxt}>")
                if c == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(successors(nxt))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()


def _single_token_inventory(grammar: GrammarSpec, sym: Sym) -> list[str]:
    """Tokens a critical symbol can realize; every option must be one token."""
    if not sym.nonterminal:
        tokens = sym.text.split()
        if len(tokens) != 1:
            raise GrammarError(f"critical literal {sym.text!r} must be a single token")
        return tokens
    inventory: list[str] = []
    for alt in grammar.rules[sym.text]:
        if len(alt.symbols) != 1 or alt.symbols[0].nonterminal:
            raise GrammarError(
                f"critical nonterminal <{sym.text}> must expand to single-token literals"
            )
        tokens = alt.symbols[0].text.split()
        if len(tokens) != 1:
            raise GrammarError(
                f"critical nonterminal <{sym.text}> has multi-token alternative {alt.symbols[0].text!r}"
            )
        inventory.append(tokens[0])
    return inventory


@dataclass(frozen=True)
class _Element:
    """Flattened symbolic element: a fixed token or an opaque free-nonterminal ref."""

    kind: str  # "tok" | "ref"
    value: str
    critical: bool = False
    spillover: bool = False


def _flatten(grammar: GrammarSpec, condition: Condition) -> list[_Element]:
    """Expand all forced structure, leaving multi-alternative nonterminals opaque."""

    def expand(sym: Sym, critical: bool, spillover: bool) -> list[_Element]:
        critical = critical or sym.critical
        spillover = spillover or sym.spillover
        if not sym.nonterminal:
            return [
                _Element("tok", tok, critical, spillover) for tok in sym.text.split()
            ]
        name = sym.text
        if grammar.is_slot(name):
            name = f"{condition.variant_of(sym.text)}{sym.text}"
        alts = grammar.rules[name]
        if len(alts) > 1:
            return [_Element("ref", name, critical, spillover)]
        out: list[_Element] = []
        for inner in alts[0].symbols:
            out.extend(expand(inner, critical, spillover))
        return out

    return expand(Sym(grammar.start, nonterminal=True), False, False)


def _validate_condition_shape(grammar: GrammarSpec, condition: Condition) -> list[_Element]:
    elements = _flatten(grammar, condition)
    criticals = [i for i, el in enumerate(elements) if el.critical]
    if len(criticals) != 1:
        raise GrammarError(
            f"condition {condition.label!r} must contain exactly one critical region, "
            f"found {len(criticals)}"
        )
    spill = [i for i, el in enumerate(elements) if el.spillover]
    if spill:
        if spill[0] <= criticals[0]:
            raise GrammarError(
                f"condition {condition.label!r}: spillover must follow the critical region"
            )
        if spill != list(range(spill[0], len(elements))):
            raise GrammarError(
                f"condition {condition.label!r}: spillover must extend to the sentence end"
            )
    return elements


def _element_inventory(grammar: GrammarSpec, el: _Element) -> set[str]:
    if el.kind == "tok":
        return {el.value}
    return set(_single_token_inventory(grammar, Sym(el.value, nonterminal=True)))


def _subtree_has_markers(grammar: GrammarSpec, symbols, visiting: frozenset) -> bool:
    for sym in symbols:
        if sym.critical or sym.spillover:
            return True
        if sym.nonterminal:
            names = (
                _slot_variants(grammar, sym.text)
                if grammar.is_slot(sym.text)
                else [sym.text]
            )
            for name in names:
                if name in visiting:
                    continue
                for alt in grammar.rules.get(name, ()):
                    if _subtree_has_markers(grammar, alt.symbols, visiting | {name}):
                        return True
    return False


def validate_grammar(grammar: GrammarSpec) -> None:
    """Structural checks; raises GrammarError on the first violation."""
    if grammar.start not in grammar.rules and not grammar.is_slot(grammar.start):
        raise GrammarError(f"start nonterminal <{grammar.start}> is not defined")
    _check_references_and_recursion(grammar)

    for nt, alts in grammar.rules.items():
        if not alts:
            raise GrammarError(f"nonterminal <{nt}> has no alternatives")

    # Critical symbols must realize exactly one token wherever they appear.
    for nt, alts in grammar.rules.items():
        for alt in alts:
            for sym in alt.symbols:
                if sym.critical:
                    _single_token_inventory(grammar, sym)

    # Region markers must sit at forced positions: a marker reachable only
    # through one alternative of a multi-alternative nonterminal would make
    # the criterion location depend on a sampled choice.
    for nt, alts in grammar.rules.items():
        if len(alts) > 1:
            for alt in alts:
                if _subtree_has_markers(grammar, alt.symbols, frozenset({nt})):
                    raise GrammarError(
                        f"critical/spillover markers may not appear inside "
                        f"alternatives of <{nt}>; exactly one critical region "
                        "must exist regardless of sampled choices"
                    )

    if not grammar.conditions:
        if grammar.criterion is not None:
            raise GrammarError("criterion declared but no conditions are defined")
        return

    shapes = {cond.label: _validate_condition_shape(grammar, cond) for cond in grammar.conditions}

    if grammar.criterion is not None:
        good_label, bad_label = grammar.criterion
        good, bad = grammar.condition(good_label), grammar.condition(bad_label)
        if not good.grammatical or bad.grammatical:
            raise GrammarError(
                "criterion must name a grammatical condition first and an ungrammatical one second"
            )
        # The compared conditions must share everything left of the critical
        # region and must realize distinct tokens at it, for every expansion.
        good_els, bad_els = shapes[good_label], shapes[bad_label]
        gi = next(i for i, el in enumerate(good_els) if el.critical)
        bi = next(i for i, el in enumerate(bad_els) if el.critical)
        if gi != bi or any(
            (a.kind, a.value) != (b.kind, b.value)
            for a, b in zip(good_els[:gi], bad_els[:bi])
        ):
            raise GrammarError(
                f"conditions {good_label!r} and {bad_label!r} must agree on all "
                "material before the critical region"
            )
        overlap = _element_inventory(grammar, good_els[gi]) & _element_inventory(grammar, bad_els[bi])
        if overlap:
            raise GrammarError(
                f"critical regions of {good_label!r} and {bad_label!r} can realize "
                f"the same token(s) {sorted(overlap)}; the pair would not be disambiguated"
            )


# --- rendering, enumeration, sampling --------------------------------------


def reachable_nonterminals(grammar: GrammarSpec) -> list[str]:
    """Nonterminals reachable from the start under any condition, in rule order."""
    conditions = grammar.conditions or (Condition("default", (), True),)
    seen: set[str] = set()
    for cond in conditions:
        visited: set[str] = set()
        frontier = [grammar.start]
        while frontier:
            nt = frontier.pop()
            if grammar.is_slot(nt):
                nt = f"{cond.variant_of(nt)}{nt}"
            if nt in visited:
                continue
            visited.add(nt)
            frontier.extend(_referenced_nonterminals(grammar, nt))
        seen |= visited
    return [nt for nt in grammar.rules if nt in seen]


def free_nonterminals(grammar: GrammarSpec) -> list[str]:
    """Reachable nonterminals with more than one alternative, in rule order."""
    return [nt for nt in reachable_nonterminals(grammar) if len(grammar.rules[nt]) > 1]


def choice_space(grammar: GrammarSpec) -> int:
    """Number of distinct shared-choice assignments."""
    size = 1
    for nt in free_nonterminals(grammar):
        size *= len(grammar.rules[nt])
    return size


# Rendering uses per-condition compiled templates: forced structure is
# flattened once, leaving free nonterminals as choice points, so building a
# record is a template walk rather than a grammar traversal.


@dataclass(frozen=True)
class _Fixed:
    tokens: tuple[str, ...]
    critical: bool
    spillover: bool


@dataclass(frozen=True)
class _ChoicePoint:
    nt: str
    alternatives: tuple[tuple, ...]  # one compiled part sequence per alternative
    critical: bool
    spillover: bool


def _merge_fixed(parts: list) -> list:
    merged: list = []
    for part in parts:
        if (
            merged
            and isinstance(part, _Fixed)
            and isinstance(merged[-1], _Fixed)
            and merged[-1].critical == part.critical
            and merged[-1].spillover == part.spillover
        ):
            merged[-1] = _Fixed(
                merged[-1].tokens + part.tokens, part.critical, part.spillover
            )
        else:
            merged.append(part)
    return merged


def _compile_condition(grammar: GrammarSpec, condition: Condition) -> tuple:
    def compile_sym(sym: Sym, critical: bool, spillover: bool) -> list:
        critical = critical or sym.critical
        spillover = spillover or sym.spillover
        if not sym.nonterminal:
            return [_Fixed(tuple(sym.text.split()), critical, spillover)]
        name = sym.text
        if grammar.is_slot(name):
            name = f"{condition.variant_of(sym.text)}{sym.text}"
        alts = grammar.rules[name]
        if len(alts) == 1:
            out: list = []
            for inner in alts[0].symbols:
                out.extend(compile_sym(inner, critical, spillover))
            return _merge_fixed(out)
        compiled = []
        for alt in alts:
            parts: list = []
            for inner in alt.symbols:
                parts.extend(compile_sym(inner, False, False))
            compiled.append(tuple(_merge_fixed(parts)))
        return [_ChoicePoint(name, tuple(compiled), critical, spillover)]

    root = compile_sym(Sym(grammar.start, nonterminal=True), False, False)
    return tuple(_merge_fixed(root))


# Keyed by grammar object identity; the grammar reference guards id reuse.
_TEMPLATE_CACHE: dict[int, tuple[GrammarSpec, dict[str, tuple]]] = {}


def _condition_template(grammar: GrammarSpec, condition: Condition) -> tuple:
    entry = _TEMPLATE_CACHE.get(id(grammar))
    if entry is None or entry[0] is not grammar:
        entry = (grammar, {})
        _TEMPLATE_CACHE[id(grammar)] = entry
    templates = entry[1]
    if condition.label not in templates:
        templates[condition.label] = _compile_condition(grammar, condition)
    return templates[condition.label]


def render(
    grammar: GrammarSpec, condition: Condition, choices: dict[str, int]
) -> ParadigmInstance:
    """Expand the start symbol under one condition with fixed shared choices."""
    tokens: list[str] = []
    critical: list[int] = []
    spillover: list[int] = []

    def emit(parts: tuple, in_critical: bool, in_spillover: bool) -> None:
        for part in parts:
            crit = in_critical or part.critical
            spill = in_spillover or part.spillover
            if isinstance(part, _Fixed):
                pos = len(tokens)
                if crit:
                    critical.extend(range(pos, pos + len(part.tokens)))
                if spill:
                    spillover.extend(range(pos, pos + len(part.tokens)))
                tokens.extend(part.tokens)
            else:
                emit(part.alternatives[choices.get(part.nt, 0)], crit, spill)

    emit(_condition_template(grammar, condition), False, False)
    if len(critical) != 1:
        raise GrammarError(
            f"condition {condition.label!r} rendered {len(critical)} critical tokens, expected 1"
        )
    spill_span = (spillover[0], spillover[-1] + 1) if spillover else None
    return ParadigmInstance(
        condition=condition.label,
        tokens=tuple(tokens),
        critical_span=(critical[0], critical[0] + 1),
        spillover_span=spill_span,
        grammatical=condition.grammatical,
    )


def build_record(grammar: GrammarSpec, choices: dict[str, int], seed: int = 0) -> MinimalPairRecord:
    if not grammar.conditions:
        raise GrammarError(f"grammar {grammar.name!r} declares no conditions")
    instances = {
        cond.label: render(grammar, cond, choices) for cond in grammar.conditions
    }
    return MinimalPairRecord(
        phenomenon=grammar.name,
        seed=seed,
        instances=instances,
        shared_choices=dict(choices),
        criterion=grammar.criterion,
    )


def enumerate_paradigms(grammar: GrammarSpec) -> Iterator[MinimalPairRecord]:
    """Every shared-choice assignment exactly once, in lexicographic choice order."""
    free = free_nonterminals(grammar)
    for combo in itertools.product(*(range(len(grammar.rules[nt])) for nt in free)):
        yield build_record(grammar, dict(zip(free, combo)))


def sample_paradigm(grammar: GrammarSpec, seed: int, index: int) -> MinimalPairRecord:
    """Deterministic function of (grammar, seed, index); uniform over alternatives
    unless the grammar declares weights."""
    # String seeding hashes via SHA-512 internally: stable across platforms.
    rng = random.Random(f"{seed}:{index}")
    choices: dict[str, int] = {}
    for nt in free_nonterminals(grammar):
        alts = grammar.rules[nt]
        weights = [alt.weight for alt in alts]
        if len(set(weights)) == 1:
            choices[nt] = rng.randrange(len(alts))
        else:
            choices[nt] = rng.choices(range(len(alts)), weights=weights, k=1)[0]
    return build_record(grammar, choices, seed=seed)
