"""Compact predicate-argument step representations.

Steps are stored as single-line strings like

    EXTRACT(Agent: you, Object: test_swab, Origin: from(nostril(of(her))))

This module parses them into trees, renders them back, scores their
structural complexity, and builds the role statistics (impact levels,
predicate-conditioned role shares) that the error planner consumes.
"""

from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass, field, replace


class SemRepParseError(ValueError):
    """Malformed representation string; carries the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


_UPPER_HEAD = re.compile(r"^[A-Z][A-Z_]*$")


@dataclass(frozen=True)
class ValueNode:
    """One node of a value tree: a bare atom, or a head with children.

    Children are (role, node) pairs; role is None for positional children
    such as the clause inside WHILE(...).
    """

    head: str
    args: tuple = ()
    has_parens: bool = False

    @property
    def is_atom(self):
        return not self.has_parens

    @property
    def is_clause(self):
        return self.has_parens and bool(_UPPER_HEAD.match(self.head))

    @property
    def is_functor(self):
        return self.has_parens and not _UPPER_HEAD.match(self.head)

    def render(self):
        if self.is_atom:
            return self.head
        parts = []
        for role, node in self.args:
            text = node.render()
            parts.append(f"{role}: {text}" if role is not None else text)
        return f"{self.head}({', '.join(parts)})"


@dataclass(frozen=True)
class SemRep:
    """A parsed step representation: uppercase predicate + top-level roles."""

    predicate: str
    arguments: tuple  # ordered (role, ValueNode) pairs, role may be None
    source_text: str = ""

    @property
    def roles(self):
        return {role: node for role, node in self.arguments if role is not None}

    def role_value(self, role):
        for r, node in self.arguments:
            if r == role:
                return node
        return None

    def with_role_value(self, role, new_node):
        """Return a copy with one top-level role's value replaced."""
        args = tuple(
            (r, new_node if r == role else node) for r, node in self.arguments
        )
        return replace(self, arguments=args, source_text="")

    def render(self):
        parts = []
        for role, node in self.arguments:
            text = node.render()
            parts.append(f"{role}: {text}" if role is not None else text)
        return f"{self.predicate}({', '.join(parts)})"


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise SemRepParseError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def token(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "(),: \t\r\n":
            self.pos += 1
        if self.pos == start:
            self.error("expected a token")
        return self.text[start:self.pos]

    def expect(self, ch):
        self.skip_ws()
        if self.peek() != ch:
            self.error(f"expected '{ch}'")
        self.pos += 1

    def parse_args(self):
        """Parse a parenthesized argument list; '(' already consumed."""
        args = []
        self.skip_ws()
        if self.peek() == ")":
            self.pos += 1
            return tuple(args)
        while True:
            args.append(self.parse_arg())
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
                continue
            if self.peek() == ")":
                self.pos += 1
                return tuple(args)
            self.error("expected ',' or ')'")

    def parse_arg(self):
        head = self.token()
        self.skip_ws()
        if self.peek() == ":":
            self.pos += 1
            return head, self.parse_value()
        if self.peek() == "(":
            self.pos += 1
            return None, ValueNode(head, self.parse_args(), has_parens=True)
        return None, ValueNode(head)

    def parse_value(self):
        head = self.token()
        self.skip_ws()
        if self.peek() == "(":
            self.pos += 1
            return ValueNode(head, self.parse_args(), has_parens=True)
        return ValueNode(head)


def parse(text):
    """Parse a representation string into a SemRep."""
    if not text or not text.strip():
        raise SemRepParseError("empty representation", 0)
    p = _Parser(text)
    predicate = p.token()
    if not _UPPER_HEAD.match(predicate):
        raise SemRepParseError(f"predicate {predicate!r} is not uppercase", 0)
    p.expect("(")
    args = p.parse_args()
    p.skip_ws()
    if p.pos != len(text):
        p.error("trailing characters after representation")
    seen = set()
    for role, _ in args:
        if role is not None:
            if role in seen:
                p.error(f"duplicate top-level role {role!r}")
            seen.add(role)
    return SemRep(predicate, args, source_text=text)


def render(rep):
    """Canonical single-line rendering; inverse of parse."""
    return rep.render()


DEFAULT_COMPLEXITY_COEFFS = (1.0, 1.0, 1.0, 1.0)


def _walk_counts(node, depth):
    """Return (predicates, roles, max_depth, functors) for a value node."""
    if node.is_atom:
        return 0, 0, depth, 0
    preds = 1 if node.is_clause else 0
    functors = 1 if node.is_functor else 0
    roles = sum(1 for role, _ in node.args if role is not None)
    max_depth = depth
    for _, child in node.args:
        p, r, d, f = _walk_counts(child, depth + 1)
        preds += p
        roles += r
        functors += f
        max_depth = max(max_depth, d)
    return preds, roles, max_depth, functors


def complexity(rep, coeffs=DEFAULT_COMPLEXITY_COEFFS):
    """Structural complexity: weighted predicates + role slots + depth + relations."""
    c1, c2, c3, c4 = coeffs
    preds = 1
    roles = 0
    max_depth = 1
    functors = 0
    for role, node in rep.arguments:
        if role is not None:
            roles += 1
        p, r, d, f = _walk_counts(node, 1)
        preds += p
        roles += r
        functors += f
        max_depth = max(max_depth, d)
    return c1 * preds + c2 * roles + c3 * max_depth + c4 * functors


# Role inventory and impact levels for the 50-scenario corpus.
HIGH_IMPACT_ROLES = ("Object", "Coobject")
MEDIUM_IMPACT_ROLES = ("Location", "Destination", "Origin", "Instrument", "Purpose", "Content")
LOW_IMPACT_ROLES = (
    "Manner", "Temporal", "Degree", "Path", "Duration", "Direction",
    "Proposition", "Result", "Quantity", "Theme", "Condition", "Criterion",
)


@dataclass
class RoleImpactMap:
    """Maps role names to impact levels; excluded roles are never mutated."""

    levels: dict = field(default_factory=dict)
    excluded: frozenset = frozenset({"Agent"})
    default_level: str = "low"

    def __post_init__(self):
        if not self.levels:
            self.levels = {r: "high" for r in HIGH_IMPACT_ROLES}
            self.levels.update({r: "medium" for r in MEDIUM_IMPACT_ROLES})
            self.levels.update({r: "low" for r in LOW_IMPACT_ROLES})
        self.excluded = frozenset(self.excluded) | {"Agent"}

    def impact(self, role):
        # Unknown roles default to low impact; the inventory is open-ended.
        return self.levels.get(role.strip(), self.default_level)

    def mutable_roles(self, rep):
        return [r for r in rep.roles if r not in self.excluded]


@dataclass
class PriorTable:
    """Per-predicate role shares estimated from a representation corpus."""

    shares: dict = field(default_factory=dict)   # predicate -> {role: share}
    counts: dict = field(default_factory=dict)   # predicate -> observation count

    def prior(self, role, predicate):
        return self.shares.get(predicate, {}).get(role, 0.0)

    def roles_for(self, predicate):
        return self.shares.get(predicate, {})


def build_role_priors(corpus):
    """Aggregate top-level role shares per predicate over a SemRep corpus."""
    if not corpus:
        raise ValueError("corpus must be nonempty")
    counts = {}
    obs = {}
    for rep in corpus:
        obs[rep.predicate] = obs.get(rep.predicate, 0) + 1
        slot = counts.setdefault(rep.predicate, {})
        for role in rep.roles:
            slot[role] = slot.get(role, 0) + 1
    shares = {}
    for pred, role_counts in counts.items():
        total = sum(role_counts.values())
        if total:
            shares[pred] = {r: c / total for r, c in role_counts.items()}
        else:
            shares[pred] = {}
    return PriorTable(shares=shares, counts=obs)


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_step_text(text):
    """Punctuation/whitespace-insensitive key used for reverse lookup."""
    return " ".join(text.lower().translate(_PUNCT_TABLE).split())


@dataclass
class SemRepCache:
    """Step-id keyed store of descriptions and parsed representations."""

    entries: dict = field(default_factory=dict)  # id -> {step_description, semantic_representation}
    reps: dict = field(default_factory=dict)     # id -> SemRep
    reverse: dict = field(default_factory=dict)  # normalized text -> id

    @classmethod
    def from_mapping(cls, mapping):
        cache = cls()
        for step_id, entry in mapping.items():
            cache.add(str(step_id), entry["step_description"], entry["semantic_representation"])
        return cache

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_mapping(json.load(fh))

    def add(self, step_id, description, representation):
        self.entries[step_id] = {
            "step_description": description,
            "semantic_representation": representation,
        }
        self.reps[step_id] = parse(representation)
        self.reverse[normalize_step_text(description)] = step_id

    def lookup(self, step_text):
        """Resolve a step text to its id, tolerating formatting variants."""
        return self.reverse.get(normalize_step_text(step_text))

    def rep_for_text(self, step_text):
        step_id = self.lookup(step_text)
        return self.reps.get(step_id) if step_id is not None else None

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.entries, fh, indent=2)

    def all_reps(self):
        return list(self.reps.values())

    def value_inventory(self):
        """Observed role values: (predicate, role) -> [rendered values]."""
        by_pred_role = {}
        by_role = {}
        for rep in self.reps.values():
            for role, node in rep.roles.items():
                val = node.render()
                by_pred_role.setdefault((rep.predicate, role), []).append(val)
                by_role.setdefault(role, []).append(val)
        return by_pred_role, by_role
