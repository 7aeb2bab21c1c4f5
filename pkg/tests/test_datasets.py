import json
import os
import shutil

import numpy as np
import pytest

from src.datasets import (
    FIXTURE_DIR,
    format_coalition_csv,
    format_task_matrix_csv,
    gen_manifest,
    list_fixtures,
    load_coalition_csv,
    load_fixture,
    load_manifest,
    load_reference_values,
    load_task_matrix_csv,
    parse_coalition_csv,
    parse_task_matrix_csv,
    save_coalition_csv,
    save_manifest,
    save_task_matrix_csv,
    verify_fixtures,
)
from src.exceptions import (
    ChecksumMismatch,
    DuplicateCoalition,
    InvalidArgument,
    NonFiniteValue,
    ParseError,
    UniverseTooLarge,
)
from src.lattice import CoalitionTable, TaskMatrix, shapley


def test_fixtures_are_pinned():
    """Bundled tables are listed and match their checksums."""
    assert list_fixtures() == ["hotpotqa_70b.csv", "hotpotqa_8b.csv"]
    assert verify_fixtures() == []


def test_fixture_reference_shapley():
    """Shapley values of the 8B fixture agree with the published ones."""
    reference = load_reference_values("hotpotqa_8b_shapley")
    phi = shapley(load_fixture("hotpotqa_8b.csv")).phi
    for name, value in reference.items():
        assert phi[name] == pytest.approx(value, abs=0.002)


def test_unknown_fixture():
    """Unknown names list what is available."""
    with pytest.raises(InvalidArgument) as excinfo:
        load_fixture("squad")
    assert "hotpotqa_8b.csv" in excinfo.value.message


def test_drifted_fixture(tmp_path):
    """Edited fixture bytes are caught before parsing."""
    directory = tmp_path / "fixtures"
    shutil.copytree(FIXTURE_DIR, directory)
    path = directory / "hotpotqa_8b.csv"
    path.write_text(path.read_text().replace("0.284", "0.294"))
    with pytest.raises(ChecksumMismatch) as excinfo:
        load_fixture("hotpotqa_8b", directory=str(directory))
    assert excinfo.value.fields["name"] == "hotpotqa_8b.csv"
    assert verify_fixtures(str(directory)) == ["hotpotqa_8b.csv"]
    os.remove(directory / "hotpotqa_70b.csv")
    assert verify_fixtures(str(directory)) == ["hotpotqa_70b.csv", "hotpotqa_8b.csv"]


def test_parse_coalition_csv():
    """Metadata lines, membership cells and values."""
    table = parse_coalition_csv(["# metric: accuracy", "A,B,value", "0,0,0.1", "1,0,0.4", "0,1,0.3", "1,1,0.5"])
    assert table.universe == ("A", "B")
    assert table.metadata == {"metric": "accuracy"}
    assert table.value("A") == pytest.approx(0.4)
    assert table.is_complete


def test_parse_partial_coalition_csv():
    """Rows may be missing and come in any order."""
    table = parse_coalition_csv(["A,B,value", "1,1,0.5", "0,0,0.1"])
    assert table.count_present == 2
    assert not table.has("A")


@pytest.mark.parametrize(
    "lines,line",
    [
        ([], 1),
        (["A,B,score", "0,0,1"], 1),
        (["A,B,value", "0,0"], 2),
        (["A,B,value", "0,2,0.1"], 2),
        (["A,B,value", "0,0,0.1", "1,0,abc"], 3),
        (["A,A,value"], 1),
    ],
)
def test_coalition_csv_parse_errors(lines, line):
    """Malformed input reports the offending line."""
    with pytest.raises(ParseError) as excinfo:
        parse_coalition_csv(lines)
    assert excinfo.value.fields["line"] == line


def test_coalition_csv_value_errors():
    """Repeated coalitions and non-finite values have their own errors."""
    with pytest.raises(DuplicateCoalition) as excinfo:
        parse_coalition_csv(["A,value", "1,0.2", "0,0.1", "1,0.3"])
    assert excinfo.value.fields == {"mask": 1, "line": 4}
    with pytest.raises(NonFiniteValue):
        parse_coalition_csv(["A,value", "0,nan"])
    with pytest.raises(NonFiniteValue):
        parse_coalition_csv(["A,value", "0,inf"])


def test_coalition_csv_file(tmp_path, table_70b):
    """Saved tables load back equal, metadata included."""
    path = tmp_path / "out" / "table.csv"
    save_coalition_csv(table_70b, str(path))
    assert load_coalition_csv(str(path)) == table_70b
    text = format_coalition_csv(table_70b)
    assert text.startswith("# source: HotpotQA, 70B model\n")
    assert "\nP,T,M,SR,R,value\n0,0,0,0,0,0.101\n" in text
    assert not [name for name in os.listdir(path.parent) if name.startswith(".tmp-")]


def test_format_skips_missing_rows():
    """Only present coalitions are written."""
    table = CoalitionTable.from_mapping(("A", "B"), {"Bare": 0.25, "All-In": 1.0})
    assert format_coalition_csv(table) == "A,B,value\n0,0,0.25\n1,1,1.0\n"


def test_parse_task_matrix_csv():
    """Universe line, coalition-label header and one row per task."""
    lines = ["# universe: A,B", "# metric: f1", "task,Bare,A,B,All-In", "q1,0.1,0.4,0.3,0.5", "q2,0.2,0.5,0.1,0.7"]
    matrix = parse_task_matrix_csv(lines)
    assert matrix.universe == ("A", "B")
    assert matrix.units == ("q1", "q2")
    assert matrix.metadata == {"metric": "f1"}
    np.testing.assert_allclose(matrix.column("All-In"), [0.5, 0.7])
    assert matrix.mean_table().value("A") == pytest.approx(0.45)


def test_task_matrix_csv_universe_argument():
    """A universe passed by the caller replaces the metadata line."""
    matrix = parse_task_matrix_csv(["task,X,Bare", "q1,0.3,0.1", "q2,0.2,0.2"], universe=["X"])
    assert matrix.is_complete
    np.testing.assert_allclose(matrix.column("X"), [0.3, 0.2])


@pytest.mark.parametrize(
    "lines",
    [
        ["task,Bare,A", "q1,0.1,0.2"],
        ["# universe: A", "id,Bare,A", "q1,0.1,0.2"],
        ["# universe: A", "task,Bare,Z", "q1,0.1,0.2"],
        ["# universe: A", "task,Bare,A", "q1,0.1"],
        ["# universe: A", "task,Bare,A", "q1,0.1,0.2", "q1,0.2,0.3"],
    ],
)
def test_task_matrix_csv_errors(lines):
    """Missing universe, bad header, bad labels, short rows and repeated tasks."""
    with pytest.raises(ParseError):
        parse_task_matrix_csv(lines)


def test_task_matrix_csv_duplicate_column():
    """The same coalition may not appear twice in the header."""
    with pytest.raises(DuplicateCoalition):
        parse_task_matrix_csv(["# universe: A", "task,A,Bare,A", "q1,0.1,0.2,0.3"])


def test_task_matrix_csv_file(tmp_path, task_matrix_8b):
    """Saved matrices load back with the same values."""
    path = tmp_path / "matrix.csv"
    save_task_matrix_csv(task_matrix_8b, str(path))
    loaded = load_task_matrix_csv(str(path))
    assert loaded.universe == task_matrix_8b.universe
    assert loaded.units == task_matrix_8b.units
    np.testing.assert_array_equal(loaded.values, task_matrix_8b.values)
    assert format_task_matrix_csv(task_matrix_8b).startswith("# universe: P,T,M,SR,R\ntask,Bare,P,T,P+T,")


def test_full_factorial_manifest():
    """Every coalition once per distinct ordering; ordering 0 is universe order."""
    manifest = gen_manifest(["A", "B", "C"], orderings=2, seed=5)
    # Bare and singletons have one ordering each, pairs and All-In two
    assert len(manifest) == 1 + 3 + 3 * 2 + 2
    assert manifest.configurations[0].id == "Bare/o0"
    full = [e for e in manifest.configurations if e.coalition == "All-In"]
    assert [e.id for e in full] == ["All-In/o0", "All-In/o1"]
    assert full[0].ordering == ["A", "B", "C"]
    assert sorted(full[1].ordering) == ["A", "B", "C"]
    assert full[1].ordering != full[0].ordering
    assert manifest.seeds == [5]


def test_manifest_is_reproducible():
    """The same seed draws the same orderings."""
    first = gen_manifest(["A", "B", "C", "D"], orderings=3, seed=9)
    second = gen_manifest(["A", "B", "C", "D"], orderings=3, seed=9)
    assert first == second


def test_listed_manifest():
    """Listed mode runs only the named coalitions."""
    manifest = gen_manifest(["A", "B", "C"], mode="listed", listed=["Bare", "A+C", 7], seeds=[1, 2, 3])
    assert [e.coalition for e in manifest.configurations] == ["Bare", "A+C", "All-In"]
    assert manifest.seeds == [1, 2, 3]


def test_manifest_arguments():
    """Bad modes, listings and sizes are refused."""
    with pytest.raises(InvalidArgument):
        gen_manifest(["A"], mode="random")
    with pytest.raises(InvalidArgument):
        gen_manifest(["A"], mode="listed")
    with pytest.raises(InvalidArgument):
        gen_manifest(["A"], mode="listed", listed=["A", "A"])
    with pytest.raises(InvalidArgument):
        gen_manifest(["A"], listed=["A"])
    with pytest.raises(InvalidArgument):
        gen_manifest(["A"], orderings=0)
    with pytest.raises(UniverseTooLarge):
        gen_manifest([f"c{i}" for i in range(21)])


def test_manifest_file(tmp_path):
    """Saved manifests load back; invalid JSON is a parse error."""
    manifest = gen_manifest(["A", "B"], orderings=2, notes="pilot")
    path = tmp_path / "manifest.json"
    save_manifest(manifest, str(path))
    assert load_manifest(str(path)) == manifest
    data = json.loads(path.read_text())
    assert data["schema_version"] == 1
    data["configurations"][1]["ordering"] = ["B", "B"]
    path.write_text(json.dumps(data))
    with pytest.raises(ParseError):
        load_manifest(str(path))
    path.write_text("")
    with pytest.raises(ParseError):
        load_manifest(str(path))


def test_manifest_orderings_are_distinct():
    """Requests beyond the number of distinct orderings are capped."""
    manifest = gen_manifest(["A", "B", "C"], orderings=10, seed=2)
    by_coalition = {}
    for entry in manifest.configurations:
        by_coalition.setdefault(entry.coalition, []).append(tuple(entry.ordering))
    assert len(by_coalition["Bare"]) == 1
    assert len(by_coalition["B"]) == 1
    assert len(by_coalition["A+C"]) == 2
    assert len(by_coalition["All-In"]) == 6
    for orderings in by_coalition.values():
        assert len(set(orderings)) == len(orderings)
    four = gen_manifest(["A", "B", "C", "D"], orderings=5, seed=2)
    full = [tuple(e.ordering) for e in four.configurations if e.coalition == "All-In"]
    assert len(full) == len(set(full)) == 5
    assert full[0] == ("A", "B", "C", "D")
