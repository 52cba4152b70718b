"""Population-size negotiation and the schema plausibility check.

The pattern generator produces, for one relationship type, the significant
combinations of instance indices allowed by its uniqueness and totality
constraints: per round a fresh all-new row, one mutated copy per role whose
uniqueness allows it, and one nil-padded row per optional role. The resize
step caps every involved type at the instance usage those patterns consume,
and the fixed point of resizing yields a maximum population per type, whose
collapse (to zero, or below the identification-derived bound) flags likely
constraint errors.

Two accounting modes exist. `strict` counts one relationship tuple per fully
filled row and lets nil padding consume nothing, which reproduces the size
propagation this analysis is meant to show. `verbatim` follows the historical
formulation to the letter (one relationship count per role per row, and the
nil template loop consumes instances); it is kept for comparison runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .extnat import INF, ExtNat, ext_min, is_finite
from .model import (
    Schema,
    TypeId,
    RoleId,
    UnknownIdError,
    initial_max_size,
    recursive_max_size,
)

SizeMap = dict[TypeId, ExtNat]
PatternRow = dict[RoleId, int]


class NonTerminatingCallError(ValueError):
    """Pattern generation needs at least one finite involved size."""


@dataclass(frozen=True)
class GenConfig:
    accounting: str = "strict"
    max_user_size_pref: int = 10

    def __post_init__(self) -> None:
        if self.accounting not in ("strict", "verbatim"):
            raise ValueError(f"unknown accounting mode: {self.accounting}")
        if self.max_user_size_pref < 1:
            raise ValueError("max_user_size_pref must be at least 1")


class PatternResult(NamedTuple):
    used: dict[TypeId, int]
    rows: tuple[PatternRow, ...]


def gen_pattern(schema: Schema, rel: TypeId, sizes: Mapping[TypeId, ExtNat],
                cfg: GenConfig = GenConfig()) -> PatternResult:
    """Significant index rows for one relationship type, with the usage they
    consume per player and for the relationship itself. Indices are 1-based;
    0 marks a nil cell. Rows come out in emission order and never repeat."""
    roles = schema.roles.get(rel)
    if roles is None:
        raise UnknownIdError(f"not a relationship type: {rel}")
    players = {p: schema.player[p] for p in roles}
    involved = set(players.values()) | {rel}
    for x in involved:
        if x not in sizes:
            raise UnknownIdError(f"no size supplied for {x}")
    if not any(is_finite(sizes[x]) for x in involved):
        raise NonTerminatingCallError(
            f"all sizes involved in {rel} are infinite; generation would not terminate")

    strict = cfg.accounting == "strict"
    used: dict[TypeId, int] = {rel: 0}
    for p in roles:
        used[players[p]] = 0
    rows: list[PatternRow] = []
    unique_sets = schema.uniqueness_of(rel)

    def players_have_room(probe: tuple[RoleId, ...]) -> bool:
        if strict:
            # aggregate per player so a row never overshoots shared players
            demand: dict[TypeId, int] = {}
            for p in probe:
                demand[players[p]] = demand.get(players[p], 0) + 1
            return all(used[t] + k <= sizes[t] for t, k in demand.items())
        return all(used[players[p]] < sizes[players[p]] for p in probe)

    def rel_has_room(extra: int) -> bool:
        return used[rel] + extra <= sizes[rel]

    def extendable(probe: tuple[RoleId, ...]) -> bool:
        if strict:
            return players_have_room(probe) and rel_has_room(1)
        return players_have_room(probe) and rel_has_room(len(probe))

    def consume(p: RoleId) -> int:
        used[players[p]] += 1
        if not strict:
            used[rel] += 1
        return used[players[p]]

    mutable = tuple(p for p in roles
                    if not any(p not in tau for tau in unique_sets))

    while extendable(roles):
        fresh: PatternRow = {}
        for p in roles:
            fresh[p] = consume(p)
        if strict:
            used[rel] += 1
        rows.append(dict(fresh))

        # probe uniqueness: repeat the fresh row with one cell replaced
        for p in roles:
            if p in mutable and extendable((p,)):
                mutated = dict(fresh)
                mutated[p] = consume(p)
                if strict:
                    used[rel] += 1
                rows.append(mutated)

        # nil template, then probe totality: one lone cell per optional role
        template: PatternRow = {p: 0 for p in roles}
        if not strict:
            for p in roles:
                consume(p)
        for p in roles:
            if not schema.is_total(p) and players_have_room((p,)) \
                    and (strict or rel_has_room(1)):
                lone = dict(template)
                lone[p] = consume(p)
                rows.append(lone)

    return PatternResult(used, tuple(rows))


def resize(schema: Schema, sizes: Mapping[TypeId, ExtNat],
           cfg: GenConfig = GenConfig()) -> SizeMap:
    """One refinement step: every relationship type with a finite involved
    size regenerates its pattern against the incoming sizes, and each
    involved type is capped at the usage observed; afterwards subtypes are
    capped at their supertypes. Pointwise non-increasing."""
    new: SizeMap = dict(sizes)
    for rel in schema.types:
        if rel not in schema.rel_types:
            continue
        involved = {schema.player[p] for p in schema.roles.get(rel, ())} | {rel}
        if not any(is_finite(sizes.get(x, INF)) for x in involved):
            continue
        used, _rows = gen_pattern(schema, rel, sizes, cfg)
        for x, u in used.items():
            new[x] = ext_min(new[x], u)
    for sub, sup in schema.subtypes:
        if sub in new and sup in new:
            new[sub] = ext_min(new[sup], new[sub])
    return new


def calc_sizes(schema: Schema, cfg: GenConfig = GenConfig()) -> SizeMap:
    """Least fixed point of resizing, started from the declared domain sizes
    (and infinity elsewhere)."""
    sizes: SizeMap = initial_max_size(schema)
    while True:
        refined = resize(schema, sizes, cfg)
        if refined == sizes:
            return sizes
        sizes = refined


@dataclass(frozen=True)
class TypeAssessment:
    type: TypeId
    initial: ExtNat
    final: ExtNat
    verdict: str  # ok | warning | error


@dataclass(frozen=True)
class PlausibilityReport:
    entries: tuple[TypeAssessment, ...]
    suspects: tuple[TypeId, ...]

    @property
    def has_errors(self) -> bool:
        return any(e.verdict == "error" for e in self.entries)

    @property
    def has_warnings(self) -> bool:
        return any(e.verdict == "warning" for e in self.entries)


def plausibility_report(schema: Schema, cfg: GenConfig = GenConfig()) -> PlausibilityReport:
    """Judge every type by its fixed-point size: zero means a near-certain
    constraint error, a size below the identification-derived bound a
    possible one. Suspect relationship types sit on the boundary: for errors
    those joining a zeroed player with one that could have had instances, for
    warnings those joining a shrunk player with an unshrunk one."""
    final = calc_sizes(schema, cfg)
    start = initial_max_size(schema)
    bound = {t: recursive_max_size(schema, t) for t in schema.types}

    entries = []
    for t in schema.types:
        f = final[t]
        if f == 0:
            verdict = "error"
        elif f < bound[t]:
            verdict = "warning"
        else:
            verdict = "ok"
        entries.append(TypeAssessment(t, bound[t], f, verdict))

    suspects: list[TypeId] = []
    for rel in schema.types:
        if rel not in schema.rel_types:
            continue
        rel_players = [schema.player[p] for p in schema.roles.get(rel, ())]
        zeroed = any(final[t] == 0 for t in rel_players)
        populous = any(start[t] > 0 for t in rel_players)
        if zeroed and populous and rel not in suspects:
            suspects.append(rel)
    for rel in schema.types:
        if rel not in schema.rel_types:
            continue
        rel_players = [schema.player[p] for p in schema.roles.get(rel, ())]
        shrunk = any(0 < final[t] < bound[t] for t in rel_players)
        unshrunk = any(final[t] >= bound[t] for t in rel_players)
        if shrunk and unshrunk and rel not in suspects:
            suspects.append(rel)

    return PlausibilityReport(tuple(entries), tuple(suspects))
