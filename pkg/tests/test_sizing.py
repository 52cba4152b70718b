from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from exemplar.dsl import parse_schema
from exemplar.extnat import INF, is_finite
from exemplar.model import initial_max_size
from exemplar.sizing import (
    GenConfig,
    NonTerminatingCallError,
    calc_sizes,
    gen_pattern,
    plausibility_report,
    resize,
)

VERBATIM = GenConfig(accounting="verbatim")


def check_pattern(schema, rel, rows):
    """Independent row checker: no uniqueness violation among fully filled
    rows; returns the projections it verified."""
    roles = schema.roles[rel]
    full = [r for r in rows if all(r[p] != 0 for p in roles)]
    for tau in schema.uniqueness_of(rel):
        ordered = [p for p in roles if p in tau]
        projections = [tuple(r[p] for p in ordered) for r in full]
        assert len(set(projections)) == len(projections), (tau, projections)
    return full


def significance_clauses(schema, rel, rows):
    """The three significance clauses, checked by brute force over the rows."""
    roles = schema.roles[rel]
    full = [r for r in rows if all(r[p] != 0 for p in roles)]
    unique_sets = schema.uniqueness_of(rel)
    out = {}
    for p in roles:
        excluded = any(p not in tau for tau in unique_sets)
        if not excluded:
            pairs = [
                (a, b) for a, b in itertools.combinations(full, 2)
                if a[p] != b[p] and all(a[q] == b[q] for q in roles if q != p)
            ]
            out[f"repeat:{p}"] = bool(pairs)
        if not schema.is_total(p):
            lone = [r for r in rows
                    if r[p] != 0 and all(r[q] == 0 for q in roles if q != p)]
            out[f"nil:{p}"] = bool(lone)
    out["full-row"] = bool(full)
    return out


def test_places_pattern_matches_hand_trace(shop):
    used, rows = gen_pattern(shop, "Places", {"Customer": 4, "Order": 6, "Places": 24})
    assert rows == (
        {"by": 1, "of": 1},
        {"by": 1, "of": 2},
        {"by": 2, "of": 0},
        {"by": 3, "of": 3},
        {"by": 3, "of": 4},
        {"by": 4, "of": 0},
    )
    assert used == {"Places": 4, "Customer": 4, "Order": 4}
    check_pattern(shop, "Places", rows)
    assert all(significance_clauses(shop, "Places", rows).values())


def test_propagation_prose_reproduced_in_strict_mode(prop):
    used, _rows = gen_pattern(prop, "F", {"A": INF, "B": 2, "F": INF})
    assert used == {"F": 2, "A": 2, "B": 2}


def test_verbatim_mode_follows_the_printed_increments(prop):
    used, rows = gen_pattern(prop, "F", {"A": INF, "B": 2, "F": INF}, VERBATIM)
    # per-role relationship increments plus the consuming nil loop
    assert used == {"F": 4, "A": 2, "B": 2}
    assert rows == ({"fa": 1, "fb": 1},)


def test_all_zero_sizes_give_empty_pattern(prop):
    used, rows = gen_pattern(prop, "F", {"A": 0, "B": 0, "F": 0})
    assert rows == ()
    assert used == {"F": 0, "A": 0, "B": 0}


def test_all_infinite_sizes_rejected(prop):
    with pytest.raises(NonTerminatingCallError):
        gen_pattern(prop, "F", {"A": INF, "B": INF, "F": INF})


def test_rel_size_caps_rows(shop):
    used, rows = gen_pattern(shop, "Places", {"Customer": 4, "Order": 6, "Places": 1})
    assert used["Places"] == 1
    full = [r for r in rows if all(v != 0 for v in r.values())]
    assert len(full) == 1


def test_strict_usage_never_exceeds_sizes(shop):
    rng = random.Random(4)
    for _ in range(100):
        sizes = {"Customer": rng.randrange(0, 9), "Order": rng.randrange(0, 9),
                 "Places": rng.randrange(0, 20)}
        used, rows = gen_pattern(shop, "Places", sizes)
        for t, u in used.items():
            assert u <= sizes[t], (t, sizes, used)
        indices = {}
        for row in rows:
            for p, v in row.items():
                player = shop.player[p]
                indices.setdefault(player, set()).add(v)
        for t, seen in indices.items():
            seen.discard(0)
            if seen:
                assert max(seen) <= used[t]


def test_shared_player_rows_respect_sizes():
    schema = parse_schema(
        "value PName size 9\n"
        "entity P refby pairs ((pr, pv))\n"
        "rel PId (pr: P, pv: PName) unique(pr) unique(pv) total(pr) total(pv)\n"
        "rel Likes (la: P, lb: P)\n"
    ).schema
    for size in range(0, 8):
        used, rows = gen_pattern(schema, "Likes", {"P": size, "Likes": 50})
        assert used["P"] <= size
        check_pattern(schema, "Likes", rows)


def test_pattern_is_deterministic(shop):
    a = gen_pattern(shop, "Places", {"Customer": 4, "Order": 6, "Places": 24})
    b = gen_pattern(shop, "Places", {"Customer": 4, "Order": 6, "Places": 24})
    assert a == b


def test_rows_are_distinct(shop, prop):
    for schema, rel, sizes in [
        (shop, "Places", {"Customer": 4, "Order": 6, "Places": 24}),
        (shop, "HasName", {"Customer": 9, "CustName": 4, "HasName": 30}),
        (prop, "F", {"A": 7, "B": 7, "F": 50}),
    ]:
        _used, rows = gen_pattern(schema, rel, sizes)
        frozen = [tuple(sorted(r.items())) for r in rows]
        assert len(set(frozen)) == len(frozen)


def test_resize_first_pass_on_prop(prop):
    first = resize(prop, initial_max_size(prop))
    assert first["B"] == 2
    assert first["BId"] == 2
    assert first["A"] == 9  # via its reference relationship
    assert first["F"] == INF  # F had no finite involvement yet
    second = resize(prop, first)
    assert second["A"] == 2
    assert second["F"] == 2


def test_resize_non_increasing(shop, prop):
    rng = random.Random(11)
    for schema in (shop, prop):
        sizes = initial_max_size(schema)
        for _ in range(6):
            smaller = resize(schema, sizes)
            for t in schema.types:
                assert smaller[t] <= sizes[t]
            sizes = smaller
        # also from arbitrary starting points
        for _ in range(20):
            sizes = {t: rng.choice([0, 1, 2, 3, 5, 9, INF]) for t in schema.types}
            smaller = resize(schema, sizes)
            for t in schema.types:
                assert smaller[t] <= sizes[t]


def test_resize_without_finite_involvement_is_identity(shop):
    sizes = {t: INF for t in shop.types}
    assert resize(shop, sizes) == sizes


def test_subtype_propagation():
    schema = parse_schema(
        "value N size 9\n"
        "entity P refby pairs ((pr, pv))\n"
        "entity S refby super P\n"
        "rel PId (pr: P, pv: N) unique(pr) unique(pv) total(pr) total(pv)\n"
        "S isa P\n"
    ).schema
    sizes = {t: INF for t in schema.types}
    sizes["P"] = 3
    sizes["S"] = 5
    out = resize(schema, sizes)
    assert out["S"] == 3


def test_calc_sizes_prop(prop):
    final = calc_sizes(prop)
    assert final == {"AVal": 2, "BVal": 2, "A": 2, "B": 2, "AId": 2, "BId": 2, "F": 2}


def test_calc_sizes_shop(shop):
    final = calc_sizes(shop)
    assert final == {"CustName": 4, "OrderNr": 4, "Qty": 3, "Customer": 4,
                     "Order": 4, "HasName": 4, "HasNr": 4, "Places": 4}


def test_calc_sizes_verbatim_diverges(prop):
    assert calc_sizes(prop, VERBATIM)["F"] == 4
    assert calc_sizes(prop, VERBATIM)["A"] == 2


def test_calc_sizes_no_relationships():
    schema = parse_schema("value V size 7\nvalue W size 2\n").schema
    assert calc_sizes(schema) == initial_max_size(schema)


def test_calc_sizes_is_a_fixed_point(shop, prop, zerosize):
    for schema in (shop, prop, zerosize):
        final = calc_sizes(schema)
        assert resize(schema, final) == final


def test_fixed_point_iteration_bound(shop, prop, zerosize):
    for schema in (shop, prop, zerosize):
        start = initial_max_size(schema)
        budget = sum(v for v in start.values() if is_finite(v)) + len(schema.types)
        sizes = start
        for step in range(budget + 1):
            refined = resize(schema, sizes)
            if refined == sizes:
                break
            sizes = refined
        else:
            pytest.fail("fixed point not reached within the budget")
        assert step <= budget


def test_plausibility_shop(shop):
    report = plausibility_report(shop)
    by_type = {e.type: e for e in report.entries}
    assert by_type["Order"].verdict == "warning"
    assert by_type["Order"].initial == 6
    assert by_type["Order"].final == 4
    assert by_type["Customer"].verdict == "ok"
    assert by_type["Qty"].verdict == "ok"
    assert report.suspects == ("Places",)
    assert not report.has_errors
    assert report.has_warnings


def test_plausibility_prop(prop):
    report = plausibility_report(prop)
    by_type = {e.type: e for e in report.entries}
    assert by_type["A"].verdict == "warning"
    assert by_type["B"].verdict == "ok"
    assert "F" in report.suspects


def test_plausibility_zero_dom_size(zerosize):
    report = plausibility_report(zerosize)
    by_type = {e.type: e for e in report.entries}
    assert by_type["Widget"].verdict == "error"
    assert by_type["EmptyCode"].verdict == "error"
    assert "WidgetId" in report.suspects  # the boundary relationship
    assert report.has_errors


def test_verdict_invariants(shop, prop, zerosize):
    for schema in (shop, prop, zerosize):
        report = plausibility_report(schema)
        for e in report.entries:
            assert (e.verdict == "error") == (e.final == 0)
            assert (e.verdict == "warning") == (0 < e.final < e.initial)


def test_gen_config_validation():
    with pytest.raises(ValueError):
        GenConfig(max_user_size_pref=0)
    with pytest.raises(ValueError):
        GenConfig(accounting="fast")


@given(
    a_size=st.integers(min_value=0, max_value=12),
    b_size=st.integers(min_value=0, max_value=12),
    rel_size=st.integers(min_value=0, max_value=24) | st.just(INF),
    unique_a=st.booleans(),
    unique_b=st.booleans(),
    unique_both=st.booleans(),
    total_a=st.booleans(),
    total_b=st.booleans(),
)
def test_random_binary_patterns_respect_uniqueness(
        a_size, b_size, rel_size, unique_a, unique_b, unique_both, total_a, total_b):
    from exemplar.model import RoleSeqRef, Schema

    uniqueness = []
    if unique_a:
        uniqueness.append(frozenset({"ra"}))
    if unique_b:
        uniqueness.append(frozenset({"rb"}))
    if unique_both:
        uniqueness.append(frozenset({"ra", "rb"}))
    totality = tuple(frozenset({r}) for r, t in (("ra", total_a), ("rb", total_b)) if t)
    schema = Schema(
        types=("A", "B", "R"),
        value_types=frozenset({"A", "B"}),
        rel_types=frozenset({"R"}),
        preds=("ra", "rb"),
        roles={"R": ("ra", "rb")},
        player={"ra": "A", "rb": "B"},
        ref_schemes={"R": RoleSeqRef(("ra", "rb"))},
        dom_sizes={"A": a_size, "B": b_size},
        uniqueness=tuple(uniqueness),
        totality=totality,
    )
    used, rows = gen_pattern(schema, "R", {"A": a_size, "B": b_size, "R": rel_size})
    check_pattern(schema, "R", rows)
    assert used["A"] <= a_size and used["B"] <= b_size
    if is_finite(rel_size):
        assert used["R"] <= rel_size
