from __future__ import annotations

import json
from pathlib import Path

import pytest

from exemplar.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def test_check_shop_warns(capsys):
    code = main(["check", str(FIXTURES / "shop.orm")])
    assert code == 1
    out = capsys.readouterr().out
    assert "warning" in out
    assert "Order" in out
    assert "Places" in out


def test_check_prop_warns(capsys):
    code = main(["check", str(FIXTURES / "prop.orm")])
    assert code == 1
    out = capsys.readouterr().out
    assert "A" in out and "F" in out


def test_check_zero_size_errors(capsys):
    code = main(["check", str(FIXTURES / "zerosize.orm")])
    assert code == 2
    assert "error" in capsys.readouterr().out


def test_check_clean_schema(tmp_path, capsys):
    path = tmp_path / "tiny.orm"
    path.write_text("value V size 3\n")
    assert main(["check", str(path)]) == 0


def test_check_missing_file(capsys):
    assert main(["check", str(FIXTURES / "nope.orm")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_check_parse_errors_exit_2(tmp_path, capsys):
    path = tmp_path / "broken.orm"
    path.write_text("rel F (a: X)\n")
    assert main(["check", str(path)]) == 2
    assert "UnknownType" in capsys.readouterr().err


def test_check_json_format(capsys):
    code = main(["check", str(FIXTURES / "shop.orm"), "--format", "json"])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    orders = [t for t in payload["types"] if t["type"] == "Order"]
    assert orders == [{"type": "Order", "initial": 6, "final": 4, "verdict": "warning"}]
    assert payload["suspects"] == ["Places"]


def test_sizes_table(capsys):
    assert main(["sizes", str(FIXTURES / "prop.orm")]) == 0
    out = capsys.readouterr().out
    lines = {l.split()[0]: l.split() for l in out.splitlines()[1:]}
    assert lines["A"] == ["A", "∞", "9", "2"]
    assert lines["F"] == ["F", "∞", "18", "2"]


def test_sizes_shop_order_row(capsys):
    assert main(["sizes", str(FIXTURES / "shop.orm")]) == 0
    out = capsys.readouterr().out
    lines = {l.split()[0]: l.split() for l in out.splitlines()[1:]}
    assert lines["Order"] == ["Order", "∞", "6", "4"]


def test_sizes_verbatim_diverges(capsys):
    main(["sizes", str(FIXTURES / "prop.orm")])
    strict = capsys.readouterr().out
    main(["sizes", str(FIXTURES / "prop.orm"), "--accounting", "verbatim"])
    verbatim = capsys.readouterr().out
    assert strict != verbatim
    lines = {l.split()[0]: l.split() for l in verbatim.splitlines()[1:]}
    assert lines["F"] == ["F", "∞", "18", "4"]


def test_grid_json_matches_golden(capsys):
    code = main(["grid", str(FIXTURES / "shop.orm"), str(FIXTURES / "shop.tree")])
    assert code == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / "shop_grid.json").read_text()


def test_grid_formats_agree_on_row_count(capsys):
    main(["grid", str(FIXTURES / "shop.orm"), str(FIXTURES / "shop.tree")])
    doc = json.loads(capsys.readouterr().out)
    json_rows = sum(len(u["rows"]) for u in doc["umbrellas"])
    main(["grid", str(FIXTURES / "shop.orm"), str(FIXTURES / "shop.tree"),
          "--format", "csv"])
    csv_lines = [l for l in capsys.readouterr().out.splitlines() if l]
    assert len(csv_lines) - len(doc["umbrellas"]) == json_rows


def test_grid_max_rows(capsys):
    main(["grid", str(FIXTURES / "shop.orm"), str(FIXTURES / "shop.tree"),
          "--max-rows", "3"])
    doc = json.loads(capsys.readouterr().out)
    roots = {row["cells"][0]["key"] for row in doc["umbrellas"][0]["rows"]}
    assert len(roots) <= 3


def test_grid_bad_tree_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.tree"
    bad.write_text("root c: Customer { edge by -> p: Places edge by -> q: Places }")
    code = main(["grid", str(FIXTURES / "shop.orm"), str(bad)])
    assert code == 2
    assert "LinkReuse" in capsys.readouterr().err
