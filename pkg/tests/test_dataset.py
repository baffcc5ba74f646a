import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catshap import CategoricalDataset, DatasetError, IngestOptions, bin_numeric, load_csv, project
from catshap.dataset import FeatureColumn, encode_column, write_csv


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_first_appearance_encoding(tmp_path):
    ds = load_csv(write(tmp_path, "a,b\nx,1\ny,1\nx,2\n"))
    assert (ds.n_features, ds.n_rows) == (2, 3)
    assert ds.columns[0].codes.tolist() == [0, 1, 0]
    assert ds.columns[1].codes.tolist() == [0, 0, 1]
    assert ds.columns[0].labels == ("x", "y")


def test_constant_column(tmp_path):
    ds = load_csv(write(tmp_path, "a,b\nx,1\nx,2\nx,3\n"))
    assert ds.columns[0].arity == 1
    assert ds.columns[0].codes.tolist() == [0, 0, 0]


def test_missing_token_is_a_category(tmp_path):
    ds = load_csv(write(tmp_path, "a,b\nx,\ny,1\n,1\n"))
    assert ds.columns[0].labels == ("x", "y", "")
    assert ds.columns[1].codes.tolist() == [0, 1, 1]


def test_drop_missing_rows(tmp_path):
    ds = load_csv(write(tmp_path, "a,b\nx,?\ny,1\nz,1\n"), IngestOptions(missing_token="?", drop_missing=True))
    assert ds.n_rows == 2
    assert ds.columns[0].labels == ("y", "z")


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty file"),
        ("a,b\nx,1\ny\n", "row 3"),
        ("a,a\nx,1\n", "duplicate"),
        ("a,b\n", "no data rows"),
    ],
)
def test_malformed_csv(tmp_path, text, match):
    with pytest.raises(DatasetError, match=match):
        load_csv(write(tmp_path, text))


def test_drop_bin_and_max_rows(tmp_path):
    p = write(tmp_path, "label,a,v\nc,x,0\nc,y,1\nd,x,2\nd,y,3\nc,x,9\n")
    ds = load_csv(p, IngestOptions(drop_columns=["label"], bins={"v": 2}, max_rows=4))
    assert ds.feature_names == ["a", "v"]
    assert ds.n_rows == 4
    assert ds.columns[1].codes.tolist() == [0, 0, 1, 1]


def test_unknown_column_option(tmp_path):
    with pytest.raises(DatasetError, match="unknown columns"):
        load_csv(write(tmp_path, "a\nx\n"), IngestOptions(drop_columns=["zz"]))


def test_breast_cancer_shape(breast_cancer):
    assert (breast_cancer.n_features, breast_cancer.n_rows) == (9, 286)
    assert breast_cancer.feature_names[:3] == ["age", "menopause", "tumor-size"]


@pytest.mark.parametrize(
    "values, n_bins, expected",
    [
        ([0.0, 0.5, 1.0], 2, [0, 0, 1]),
        ([3.0, 3.0, 3.0], 4, [0, 0, 0]),
        (list(range(10)), 5, [0, 0, 1, 1, 2, 2, 3, 3, 4, 4]),
    ],
)
def test_bin_numeric(values, n_bins, expected):
    col = bin_numeric(values, n_bins)
    assert col.codes.tolist() == expected
    assert col.arity == len(set(expected))


def test_bin_numeric_compacts_empty_bins():
    col = bin_numeric([0.0, 0.1, 10.0], 3)
    assert col.codes.tolist() == [0, 0, 1]


@pytest.mark.parametrize("bad", [[0.0, float("nan")], [1.0, float("inf")]])
def test_bin_numeric_rejects_non_finite(bad):
    with pytest.raises(DatasetError):
        bin_numeric(bad, 2)


def test_project():
    ds = CategoricalDataset.from_codes(np.array([[0, 1, 0], [1, 0, 0], [1, 1, 1]]))
    sub = project(ds, [2, 0])
    assert sub.feature_names == ["f0", "f2"]
    assert project(ds, range(3)) == ds
    with pytest.raises(DatasetError):
        project(ds, [])
    with pytest.raises(DatasetError):
        project(ds, [3])


def test_invariants_enforced():
    with pytest.raises(DatasetError, match="dense"):
        FeatureColumn("a", np.array([0, 2]), ("x", "y", "z"))
    col = FeatureColumn("a", np.array([0, 1]), ("x", "y"))
    with pytest.raises(DatasetError, match="duplicate"):
        CategoricalDataset((col, col))
    with pytest.raises(DatasetError, match="rows"):
        CategoricalDataset((col, FeatureColumn("b", np.array([0]), ("x",))))
    with pytest.raises(ValueError):
        col.codes[0] = 1


def test_from_array_nan_is_one_category():
    ds = CategoricalDataset.from_array(np.array([["a", np.nan], ["b", None], ["a", 1.0]], dtype=object))
    assert ds.columns[1].codes.tolist() == [0, 0, 1]


def test_load_is_deterministic(tmp_path, breast_cancer):
    p = tmp_path / "bc.csv"
    write_csv(breast_cancer, p)
    again = load_csv(p)
    assert again.fingerprint == breast_cancer.fingerprint
    assert load_csv(p).fingerprint == again.fingerprint


labels = st.text(alphabet="abcxyz ,\"'\n?", min_size=0, max_size=4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(labels, labels), min_size=1, max_size=30))
def test_csv_round_trip(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("rt") / "r.csv"
    ds = CategoricalDataset(
        (encode_column([r[0] for r in rows], "p"), encode_column([r[1] for r in rows], "q"))
    )
    assert ds.decode() == [list(r) for r in rows]
    write_csv(ds, path)
    back = load_csv(path)
    assert back.decode() == [list(r) for r in rows]
    assert back.fingerprint == ds.fingerprint
