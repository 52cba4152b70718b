from __future__ import annotations

from pathlib import Path

from exemplar.grid import build_grid_document
from exemplar.sizing import GenConfig
from exemplar.tree import Link, add_edge, explode, new_tree

GOLDEN = Path(__file__).parent / "golden"


def test_document_structure(shop, shop_tree, shop_labels):
    doc = build_grid_document(shop, shop_tree)
    assert len(doc.umbrellas) == 1  # the implicit node and the leaf head none
    u = doc.umbrellas[0]
    assert u.root == shop_labels["c"]
    assert [c.type for c in u.columns] == ["Customer", "Order"]
    customer, order = u.columns
    assert customer.can_extend  # cOf is still available
    assert not customer.explodable  # single-pair identification
    assert not customer.exploded
    assert order.can_extend
    rows = [tuple(c.text for c in row) for row in u.rows]
    assert rows == [
        ("Ann", "OrderNr1"),
        ("Ann", "OrderNr6"),
        ("Bob", "OrderNr2"),
        ("Bob", "OrderNr5"),
        ("Di", None),
        ("Cy", None),
    ]
    keys = [tuple(c.key for c in row) for row in u.rows]
    assert keys[0] == ("Customer#1", "Order#1")
    assert keys[4] == ("Customer#2", None)


def test_hover_keys_link_rows(shop, shop_tree):
    doc = build_grid_document(shop, shop_tree)
    u = doc.umbrellas[0]
    ann_rows = [i for i, row in enumerate(u.rows)
                if any(c.key == "Customer#1" for c in row)]
    assert ann_rows == [0, 1]


def test_json_bytes_deterministic(shop, shop_tree):
    a = build_grid_document(shop, shop_tree).to_json()
    b = build_grid_document(shop, shop_tree).to_json()
    assert a == b
    assert a.encode() == (GOLDEN / "shop_grid.json").read_bytes()


def test_csv_and_table_row_counts_match_json(shop, shop_tree):
    doc = build_grid_document(shop, shop_tree)
    json_rows = sum(len(u.rows) for u in doc.umbrellas)
    csv_lines = [l for l in doc.to_csv().splitlines() if l]
    assert len(csv_lines) == json_rows + len(doc.umbrellas)  # one header per umbrella


def test_max_rows_flag_caps_the_root(shop, shop_tree):
    doc = build_grid_document(shop, shop_tree, GenConfig(max_user_size_pref=3))
    u = doc.umbrellas[0]
    roots = {row[0].key for row in u.rows}
    assert len(roots) <= 3


def test_exploded_column_splits(shop):
    tree = new_tree(shop, "Places")
    tree = explode(shop, tree, "n0")
    doc = build_grid_document(shop, tree)
    # a lone exploded node heads no relationships, so no umbrella appears
    assert doc.umbrellas == ()

    tree = new_tree(shop, "Order")
    root = tree.nodes[0]
    tree = add_edge(shop, tree, root, Link("oOf"))
    hasnr = next(m for (l, m) in tree.out_edges(root) if l == Link("oOf"))
    doc = build_grid_document(shop, tree)
    u = doc.umbrellas[0]
    assert [c.type for c in u.columns] == ["Order", "HasNr"]
    hasnr_col = u.columns[1]
    assert hasnr_col.explodable and not hasnr_col.exploded

    tree = explode(shop, tree, hasnr)
    doc = build_grid_document(shop, tree)
    u = doc.umbrellas[0]
    assert [c.type for c in u.columns] == ["Order", "Order", "OrderNr"]
    assert all(c.exploded and c.exploded_from == hasnr for c in u.columns[1:])
    # exploded relationship columns show the row's own role instances
    for row in u.rows:
        order_cell, split_order, split_nr = row
        assert split_order.text == order_cell.text


def test_flags_agree_with_tree_operations(shop, shop_tree):
    from exemplar.model import ref_component_count
    from exemplar.tree import extension_candidates, _ref_scheme_of

    doc = build_grid_document(shop, shop_tree)
    idf = shop_tree.identification_nodes()
    for u in doc.umbrellas:
        for col in u.columns:
            if col.node not in idf:
                assert col.can_extend == bool(
                    extension_candidates(shop, shop_tree, col.node))
            ref = _ref_scheme_of(shop, shop_tree.obj[col.node])
            multi = ref is not None and ref_component_count(ref) >= 2
            assert col.explodable == (multi and col.node not in shop_tree.n_ref_sch)


def test_verbatim_accounting_changes_the_grid(shop, shop_tree):
    strict = build_grid_document(shop, shop_tree)
    verbatim = build_grid_document(shop, shop_tree, GenConfig(accounting="verbatim"))
    assert strict.to_json() != verbatim.to_json()
