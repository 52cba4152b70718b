"""Conceptual-schema metamodel: types, roles, constraints, identification.

A schema is the interface between the generator and whatever fact base
produced it. It carries the type partition (value / entity / relationship
types), the role partition with its player function, subtyping, reference
schemes, modeller-given value-domain sizes, and the uniqueness / totality
constraint sets. Schema values are immutable; every operation here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .extnat import INF, ExtNat

TypeId = str
RoleId = str
NodeId = str


class UnknownIdError(LookupError):
    """An operation was handed a type or role id the schema does not know."""


class UndefinedIdentificationError(ValueError):
    """Identification was requested for a type that has no reference scheme."""


class MissingDomSizeError(ValueError):
    """A value type has no declared domain size, so no size can be derived."""


# --- reference schemes -------------------------------------------------------

@dataclass(frozen=True)
class SuperTypeRef:
    """Identified by a supertype's instances."""

    type: TypeId


@dataclass(frozen=True)
class RoleSeqRef:
    """Identified by the roles of one relationship type (objectification)."""

    roles: tuple[RoleId, ...]


@dataclass(frozen=True)
class PairSeqRef:
    """Composite identification by role pairs (p, q): p is played by the
    identified type, q by the identifying type; both sit in one relationship
    type per pair."""

    pairs: tuple[tuple[RoleId, RoleId], ...]


RefScheme = SuperTypeRef | RoleSeqRef | PairSeqRef


def ref_component_count(ref: RefScheme) -> int:
    if isinstance(ref, SuperTypeRef):
        return 1
    if isinstance(ref, RoleSeqRef):
        return len(ref.roles)
    return len(ref.pairs)


# --- violations --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One broken well-formedness rule; data, never an exception."""

    code: str
    message: str
    subjects: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


# --- the schema itself -------------------------------------------------------

@dataclass(frozen=True)
class Schema:
    types: tuple[TypeId, ...] = ()
    value_types: frozenset[TypeId] = frozenset()
    rel_types: frozenset[TypeId] = frozenset()
    preds: tuple[RoleId, ...] = ()
    roles: Mapping[TypeId, tuple[RoleId, ...]] = field(default_factory=dict)
    player: Mapping[RoleId, TypeId] = field(default_factory=dict)
    subtypes: tuple[tuple[TypeId, TypeId], ...] = ()
    ref_schemes: Mapping[TypeId, RefScheme] = field(default_factory=dict)
    dom_sizes: Mapping[TypeId, int] = field(default_factory=dict)
    value_examples: Mapping[TypeId, tuple[str, ...]] = field(default_factory=dict)
    uniqueness: tuple[frozenset[RoleId], ...] = ()
    totality: tuple[frozenset[RoleId], ...] = ()

    @property
    def obj_types(self) -> tuple[TypeId, ...]:
        return tuple(t for t in self.types if t not in self.rel_types)

    def is_value_type(self, t: TypeId) -> bool:
        return t in self.value_types

    def is_rel_type(self, t: TypeId) -> bool:
        return t in self.rel_types

    def is_total(self, role: RoleId) -> bool:
        """Totality of a single role; only singleton totality sets count."""
        return any(len(s) == 1 and role in s for s in self.totality)

    def uniqueness_of(self, rel: TypeId) -> tuple[frozenset[RoleId], ...]:
        rel_roles = set(self.roles.get(rel, ()))
        return tuple(u for u in self.uniqueness if u and u <= rel_roles)


def rel_of(schema: Schema, role: RoleId) -> TypeId:
    """The relationship type whose role partition contains `role`."""
    if role not in schema.player:
        raise UnknownIdError(f"unknown role: {role}")
    for rel, rel_roles in schema.roles.items():
        if role in rel_roles:
            return rel
    raise UnknownIdError(f"role not in any relationship type: {role}")


def type_related(schema: Schema, x: TypeId, y: TypeId) -> bool:
    """Whether two types may share instances: the reflexive-symmetric-
    transitive closure of the subtype relation."""
    known = set(schema.types)
    if x not in known:
        raise UnknownIdError(f"unknown type: {x}")
    if y not in known:
        raise UnknownIdError(f"unknown type: {y}")
    if x == y:
        return True
    neighbours: dict[TypeId, set[TypeId]] = {}
    for sub, sup in schema.subtypes:
        neighbours.setdefault(sub, set()).add(sup)
        neighbours.setdefault(sup, set()).add(sub)
    seen = {x}
    frontier = [x]
    while frontier:
        t = frontier.pop()
        for n in neighbours.get(t, ()):
            if n == y:
                return True
            if n not in seen:
                seen.add(n)
                frontier.append(n)
    return False


def idf_objs(schema: Schema, x: TypeId) -> tuple[TypeId, ...]:
    """The types whose instances directly identify x's instances."""
    if x not in set(schema.types):
        raise UnknownIdError(f"unknown type: {x}")
    ref = schema.ref_schemes.get(x)
    if ref is None:
        raise UndefinedIdentificationError(f"no reference scheme for: {x}")
    if isinstance(ref, SuperTypeRef):
        return (ref.type,)
    if isinstance(ref, RoleSeqRef):
        return tuple(schema.player[p] for p in ref.roles)
    return tuple(schema.player[q] for _p, q in ref.pairs)


def validate_schema(schema: Schema) -> list[Violation]:
    """All well-formedness violations, in a deterministic order."""
    out: list[Violation] = []
    known = set(schema.types)

    # role partition and player totality
    seen_roles: dict[RoleId, TypeId] = {}
    for rel, rel_roles in schema.roles.items():
        if rel not in schema.rel_types:
            out.append(Violation(
                "RolePartition", f"roles declared for non-relationship type {rel}", (rel,)))
        for r in rel_roles:
            if r in seen_roles:
                out.append(Violation(
                    "RolePartition", f"role {r} appears in both {seen_roles[r]} and {rel}",
                    (r, seen_roles[r], rel)))
            seen_roles[r] = rel
    for r in schema.preds:
        if r not in seen_roles:
            out.append(Violation(
                "RolePartition", f"role {r} belongs to no relationship type", (r,)))
        p = schema.player.get(r)
        if p is None:
            out.append(Violation("RolePartition", f"role {r} has no player", (r,)))
        elif p not in known:
            out.append(Violation("UnknownType", f"role {r} played by unknown type {p}", (r, p)))

    # subtyping is between object types only
    for sub, sup in schema.subtypes:
        if sub not in known or sup not in known:
            out.append(Violation("SubtypeInvalid", f"subtype pair ({sub}, {sup}) names unknown types",
                                 (sub, sup)))
        elif sub in schema.rel_types or sup in schema.rel_types:
            out.append(Violation("SubtypeInvalid",
                                 f"subtyping between relationship types is not supported: {sub} isa {sup}",
                                 (sub, sup)))

    # value types need a domain size; sizes must not grow downwards
    for t in schema.types:
        if t in schema.value_types and t not in schema.dom_sizes:
            out.append(Violation("MissingDomSize", f"value type {t} has no domain size", (t,)))
    for sub, sup in schema.subtypes:
        if sub in schema.value_types and sup in schema.value_types:
            ds, dsup = schema.dom_sizes.get(sub), schema.dom_sizes.get(sup)
            if ds is not None and dsup is not None and ds > dsup:
                out.append(Violation(
                    "DomSizeMonotonicity",
                    f"domain size of {sub} ({ds}) exceeds its supertype {sup} ({dsup})",
                    (sub, sup)))

    # every non-value type must be identified
    for t in schema.types:
        if t in schema.value_types:
            continue
        ref = schema.ref_schemes.get(t)
        if ref is None:
            out.append(Violation("MissingReferenceScheme",
                                 f"non-value type {t} has no reference scheme", (t,)))
            continue
        out.extend(_check_ref_scheme(schema, t, ref))

    # identification must not cycle
    out.extend(_check_identification_acyclic(schema))

    # uniqueness sets must stay inside one relationship type
    for u in schema.uniqueness:
        rels = set()
        ok = True
        for r in sorted(u):
            if r not in schema.player:
                out.append(Violation("UnknownRole", f"uniqueness constraint names unknown role {r}", (r,)))
                ok = False
            else:
                rels.add(seen_roles.get(r))
        if ok and len(rels) > 1:
            out.append(Violation(
                "InterPredicateUniquenessUnsupported",
                "uniqueness set " + "{" + ", ".join(sorted(u)) + "} spans relationship types "
                + ", ".join(sorted(str(x) for x in rels))
                + "; enforce it on a derived relationship type instead",
                tuple(sorted(u))))

    # totality sets: singletons only
    for s in schema.totality:
        for r in sorted(s):
            if r not in schema.player:
                out.append(Violation("UnknownRole", f"totality constraint names unknown role {r}", (r,)))
        if len(s) != 1:
            out.append(Violation(
                "NonSingletonTotality",
                "totality over role sets is not supported: {" + ", ".join(sorted(s)) + "}",
                tuple(sorted(s))))

    # example lists must fit the domain and not repeat
    for t, examples in schema.value_examples.items():
        if t not in schema.value_types:
            out.append(Violation("ValueExamplesInvalid",
                                 f"examples declared for non-value type {t}", (t,)))
            continue
        size = schema.dom_sizes.get(t)
        if size is not None and len(examples) > size:
            out.append(Violation(
                "ValueExamplesInvalid",
                f"{t} declares {len(examples)} examples but domain size {size}", (t,)))
        if len(set(examples)) != len(examples):
            out.append(Violation("ValueExamplesInvalid", f"{t} has duplicate examples", (t,)))

    return out


def _check_ref_scheme(schema: Schema, t: TypeId, ref: RefScheme) -> list[Violation]:
    out: list[Violation] = []
    known = set(schema.types)
    if isinstance(ref, SuperTypeRef):
        if ref.type not in known:
            out.append(Violation("InvalidReferenceScheme",
                                 f"{t} identified by unknown type {ref.type}", (t, ref.type)))
        return out
    if isinstance(ref, RoleSeqRef):
        if not ref.roles:
            out.append(Violation("InvalidReferenceScheme", f"{t} has an empty role identification", (t,)))
            return out
        rels = set()
        for r in ref.roles:
            if r not in schema.player:
                out.append(Violation("InvalidReferenceScheme",
                                     f"{t} identified by unknown role {r}", (t, r)))
                return out
            rels.add(rel_of(schema, r))
        if len(rels) > 1:
            out.append(Violation("InvalidReferenceScheme",
                                 f"identification roles of {t} span several relationship types", (t,)))
        return out
    if not ref.pairs:
        out.append(Violation("InvalidReferenceScheme", f"{t} has an empty pair identification", (t,)))
        return out
    for p, q in ref.pairs:
        if p not in schema.player or q not in schema.player:
            out.append(Violation("InvalidReferenceScheme",
                                 f"{t} identified by unknown role pair ({p}, {q})", (t, p, q)))
            continue
        if rel_of(schema, p) != rel_of(schema, q):
            out.append(Violation("InvalidReferenceScheme",
                                 f"identification pair ({p}, {q}) of {t} spans two relationship types",
                                 (t, p, q)))
        if schema.player[p] != t:
            out.append(Violation("InvalidReferenceScheme",
                                 f"identification pair ({p}, {q}) of {t}: {p} is played by "
                                 f"{schema.player[p]}, not {t}", (t, p, q)))
    return out


def _identification_edges(schema: Schema, t: TypeId) -> tuple[TypeId, ...]:
    try:
        return idf_objs(schema, t)
    except (UndefinedIdentificationError, UnknownIdError, KeyError):
        return ()


def _check_identification_acyclic(schema: Schema) -> list[Violation]:
    out: list[Violation] = []
    state: dict[TypeId, int] = {}  # 1 = visiting, 2 = done

    def visit(t: TypeId, trail: tuple[TypeId, ...]) -> None:
        mark = state.get(t)
        if mark == 2:
            return
        if mark == 1:
            cycle = trail[trail.index(t):] + (t,)
            out.append(Violation("IdentificationCycle",
                                 "identification cycles through " + " -> ".join(cycle), cycle))
            return
        state[t] = 1
        for dep in _identification_edges(schema, t):
            visit(dep, trail + (t,))
        state[t] = 2

    for t in schema.types:
        visit(t, ())
    return out


def initial_max_size(schema: Schema) -> dict[TypeId, ExtNat]:
    """Starting sizes for the fixed point: a value type's domain size where
    declared, a potentially infinite population everywhere else."""
    sizes: dict[TypeId, ExtNat] = {}
    for t in schema.types:
        if t in schema.value_types and t in schema.dom_sizes:
            sizes[t] = schema.dom_sizes[t]
        else:
            sizes[t] = INF
    return sizes


def recursive_max_size(schema: Schema, x: TypeId) -> int:
    """Context-free population bound: a value type's domain size, otherwise
    the product over the directly identifying types; relationship types
    without their own reference scheme multiply their role players."""
    if x not in set(schema.types):
        raise UnknownIdError(f"unknown type: {x}")
    memo: dict[TypeId, int] = {}
    visiting: set[TypeId] = set()

    def go(t: TypeId) -> int:
        if t in memo:
            return memo[t]
        if t in visiting:
            raise UndefinedIdentificationError(f"identification cycles at {t}")
        if t in schema.value_types:
            if t not in schema.dom_sizes:
                raise MissingDomSizeError(f"value type {t} has no domain size")
            memo[t] = schema.dom_sizes[t]
            return memo[t]
        visiting.add(t)
        if t in schema.ref_schemes:
            parts = idf_objs(schema, t)
        elif t in schema.rel_types:
            parts = tuple(schema.player[p] for p in schema.roles.get(t, ()))
        else:
            raise UndefinedIdentificationError(f"no reference scheme for: {t}")
        result = 1
        for part in parts:
            result *= go(part)
        visiting.discard(t)
        memo[t] = result
        return result

    return go(x)
