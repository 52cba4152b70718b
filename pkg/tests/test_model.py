from __future__ import annotations

import itertools

import pytest

from exemplar.extnat import INF
from exemplar.model import (
    PairSeqRef,
    RoleSeqRef,
    Schema,
    SuperTypeRef,
    UndefinedIdentificationError,
    UnknownIdError,
    idf_objs,
    initial_max_size,
    recursive_max_size,
    rel_of,
    type_related,
    validate_schema,
)


def chain_schema() -> Schema:
    """a isa b isa c, plus an unrelated d; all identified by one value type."""
    return Schema(
        types=("V", "a", "b", "c", "d", "R"),
        value_types=frozenset({"V"}),
        rel_types=frozenset({"R"}),
        preds=("p", "q"),
        roles={"R": ("p", "q")},
        player={"p": "c", "q": "V"},
        subtypes=(("a", "b"), ("b", "c")),
        ref_schemes={
            "a": SuperTypeRef("b"),
            "b": SuperTypeRef("c"),
            "c": PairSeqRef((("p", "q"),)),
            "d": SuperTypeRef("c"),
            "R": RoleSeqRef(("p", "q")),
        },
        dom_sizes={"V": 5},
    )


def test_rel_of_partition_lookup(shop):
    assert rel_of(shop, "cOf") == "HasName"
    assert rel_of(shop, "by") == "Places"
    with pytest.raises(UnknownIdError):
        rel_of(shop, "nope")


def test_type_related_reflexive(shop):
    for t in shop.types:
        assert type_related(shop, t, t)


def test_type_related_symmetry_and_declared_pairs():
    s = chain_schema()
    assert type_related(s, "a", "b")
    assert type_related(s, "b", "a")


def test_type_related_transitive_chain_matches_closure_oracle():
    s = chain_schema()
    assert type_related(s, "a", "c")
    # brute-force closure oracle over the declared pairs
    related = {(t, t) for t in s.types}
    related |= set(s.subtypes) | {(y, x) for x, y in s.subtypes}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(related), repeat=2):
            if b == c and (a, d) not in related:
                related.add((a, d))
                changed = True
    for x in s.types:
        for y in s.types:
            assert type_related(s, x, y) == ((x, y) in related), (x, y)


def test_type_related_unknown_type(shop):
    with pytest.raises(UnknownIdError):
        type_related(shop, "Customer", "Ghost")


def test_distinct_relationship_types_never_related(shop):
    rels = sorted(shop.rel_types)
    for x, y in itertools.combinations(rels, 2):
        assert not type_related(shop, x, y)


def test_idf_objs_cases(shop):
    assert idf_objs(shop, "Customer") == ("CustName",)
    assert idf_objs(shop, "Places") == ("Customer", "Order")  # objectification
    s = chain_schema()
    assert idf_objs(s, "a") == ("b",)
    with pytest.raises(UndefinedIdentificationError):
        idf_objs(shop, "CustName")


def test_validate_clean_fixture(shop):
    assert validate_schema(shop) == []


def test_validate_is_idempotent(shop):
    assert validate_schema(shop) == validate_schema(shop)


def test_dom_size_monotonicity_violation():
    s = Schema(
        types=("small", "big"),
        value_types=frozenset({"small", "big"}),
        subtypes=(("small", "big"),),
        dom_sizes={"small": 5, "big": 3},
    )
    codes = [v.code for v in validate_schema(s)]
    assert "DomSizeMonotonicity" in codes


def test_inter_predicate_uniqueness_rejected(shop):
    from dataclasses import replace

    s = replace(shop, uniqueness=shop.uniqueness + (frozenset({"by", "cOf"}),))
    violations = validate_schema(s)
    assert any(v.code == "InterPredicateUniquenessUnsupported" for v in violations)
    # the diagnostic points at the standard workaround
    msg = next(v.message for v in violations
               if v.code == "InterPredicateUniquenessUnsupported")
    assert "derived relationship" in msg


def test_non_singleton_totality_rejected(shop):
    from dataclasses import replace

    s = replace(shop, totality=shop.totality + (frozenset({"by", "of"}),))
    assert any(v.code == "NonSingletonTotality" for v in validate_schema(s))


def test_missing_dom_size_rejected():
    s = Schema(types=("V",), value_types=frozenset({"V"}))
    assert any(v.code == "MissingDomSize" for v in validate_schema(s))


def test_missing_reference_scheme_rejected():
    s = Schema(types=("E",))
    assert any(v.code == "MissingReferenceScheme" for v in validate_schema(s))


def test_identification_cycle_detected():
    s = Schema(
        types=("x", "y"),
        ref_schemes={"x": SuperTypeRef("y"), "y": SuperTypeRef("x")},
    )
    assert any(v.code == "IdentificationCycle" for v in validate_schema(s))


def test_initial_max_size(shop):
    sizes = initial_max_size(shop)
    assert sizes["CustName"] == 4  # modeller-given domain
    assert sizes["Qty"] == 3
    assert sizes["Customer"] == INF  # entities start potentially infinite
    assert sizes["Places"] == INF
    assert set(sizes) == set(shop.types)
    # in a valid schema, infinity marks exactly the non-value types
    for t in shop.types:
        assert (sizes[t] == INF) == (t not in shop.value_types)


def test_recursive_max_size(shop):
    assert recursive_max_size(shop, "CustName") == 4
    assert recursive_max_size(shop, "Customer") == 4
    assert recursive_max_size(shop, "Order") == 6
    assert recursive_max_size(shop, "Places") == 24  # 4 customers x 6 orders
    for t in shop.types:
        assert recursive_max_size(shop, t) >= 1


def test_recursive_max_size_two_identifiers():
    s = Schema(
        types=("U", "W", "E", "R"),
        value_types=frozenset({"U", "W"}),
        rel_types=frozenset({"R"}),
        preds=("e1", "u1", "w1"),
        roles={"R": ("e1", "u1", "w1")},
        player={"e1": "E", "u1": "U", "w1": "W"},
        ref_schemes={"E": PairSeqRef((("e1", "u1"), ("e1", "w1"))),
                     "R": RoleSeqRef(("e1", "u1", "w1"))},
        dom_sizes={"U": 3, "W": 4},
    )
    assert recursive_max_size(s, "E") == 12
