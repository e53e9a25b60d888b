import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admui.errors import EmptyAfterFiltering, MalformedFile, UnknownColumn, UnparseableNumeric
from admui.ingest import (
    ColumnSpec,
    DatasetConfig,
    IngestReport,
    format_joint,
    load_joint,
    load_joint_from_table,
    save_joint,
)
from admui.probkit import Alphabet, gen_copy, validate_joint

from conftest import random_joint


def _cfg(**kw):
    return DatasetConfig(ColumnSpec("income"), ColumnSpec("sex"), ColumnSpec("edu"), **kw)


def test_round_trip_is_bit_exact(tmp_path, rng):
    for shape in [(2, 2, 2), (3, 4, 2)]:
        d = validate_joint(random_joint(rng, shape))
        save_joint(d, tmp_path / "a.pid")
        assert load_joint(tmp_path / "a.pid") == d


def test_round_trip_odd_labels(tmp_path):
    labels = (Alphabet(("<=50K", ">50K")), Alphabet(("a b", "100%")), Alphabet(("x\ty", "é")))
    d = validate_joint(np.full((2, 2, 2), 0.125), labels)
    save_joint(d, tmp_path / "a.pid")
    assert load_joint(tmp_path / "a.pid") == d
    assert "<=50K" in format_joint(d)


def test_four_row_example(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("income,sex,edu\n>50K,M,BA\n<=50K,F,HS\n<=50K,M,HS\n>50K,F,BA\n")
    d = load_joint_from_table(f, _cfg())
    assert d.shape == (2, 2, 2)
    assert d.alphabets[0].labels == (">50K", "<=50K")
    assert np.count_nonzero(d.pmf) == 4
    assert np.all(d.pmf[d.pmf > 0] == 0.25)


def test_alpha_pseudocount(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("income,sex,edu\n>50K,M,BA\n<=50K,F,HS\n")
    d = load_joint_from_table(f, _cfg(alpha=1.0))
    assert d.pmf.min() == pytest.approx(1 / 10)
    assert d.pmf.max() == pytest.approx(2 / 10)


def test_missing_and_unparseable_rows(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("age;sex;income\n30;M;hi\n?;F;lo\nabc;F;lo\n50;;hi\ninf;M;lo\n22;F;lo\n")
    cfg = DatasetConfig(ColumnSpec("income"), ColumnSpec("age", "binned", (24, 35, 50)), ColumnSpec("sex"),
                        delimiter=";")
    rep = IngestReport()
    d = load_joint_from_table(f, cfg, rep)
    assert rep.rows_read == 6 and rep.rows_kept == 2
    assert rep.drop_reasons == {"missing": 2, "unparseable": 1, "non-finite": 1}
    assert d.alphabets[1].labels == ("<24", "24-35", "35-50", ">=50")
    with pytest.raises(UnparseableNumeric):
        load_joint_from_table(f, DatasetConfig(cfg.s_column, cfg.y_column, cfg.z_column, delimiter=";",
                                               strict_numeric=True))


def test_column_errors(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("a,b,c\n?,?,?\n")
    with pytest.raises(UnknownColumn):
        load_joint_from_table(f, _cfg())
    with pytest.raises(EmptyAfterFiltering):
        load_joint_from_table(f, DatasetConfig(ColumnSpec("a"), ColumnSpec("b"), ColumnSpec("c")))
    f.write_text("\n")
    with pytest.raises(EmptyAfterFiltering):
        load_joint_from_table(f, DatasetConfig(ColumnSpec("0"), ColumnSpec("1"), ColumnSpec("2"), header=False))


def test_headerless_indices(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("1,a,x\n0,b,y\n")
    d = load_joint_from_table(f, DatasetConfig(ColumnSpec("0"), ColumnSpec("1"), ColumnSpec("2"), header=False))
    assert d.shape == (2, 2, 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from("xyz"), st.sampled_from("pq")),
                min_size=1, max_size=30), st.randoms())
def test_row_order_only_relabels(tmp_path_factory, rows, rnd):
    d = tmp_path_factory.mktemp("perm")
    shuffled = rows[:]
    rnd.shuffle(shuffled)
    dists = []
    for name, rs in (("a.csv", rows), ("b.csv", shuffled)):
        (d / name).write_text("s,y,z\n" + "".join(f"{r[0]},{r[1]},{r[2]}\n" for r in rs))
        dists.append(load_joint_from_table(d / name, DatasetConfig(ColumnSpec("s"), ColumnSpec("y"), ColumnSpec("z"))))
    a, b = dists
    for s in a.alphabets[0].labels:
        for y in a.alphabets[1].labels:
            for z in a.alphabets[2].labels:
                ia = (a.alphabets[0].index(s), a.alphabets[1].index(y), a.alphabets[2].index(z))
                ib = (b.alphabets[0].index(s), b.alphabets[1].index(y), b.alphabets[2].index(z))
                assert a.pmf[ia] == b.pmf[ib]


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_binning_is_total(x):
    spec = ColumnSpec("age", "binned", (24, 35, 50))
    label = spec.bin_of(x)
    assert label in spec.labels
    assert (label == "<24") == (x < 24)
    assert (label == ">=50") == (x >= 50)


def test_bin_spec_validation():
    with pytest.raises(ValueError):
        ColumnSpec("a", "binned", (3, 1))
    with pytest.raises(ValueError):
        ColumnSpec("a", "binned", (1, 2), labels=("lo", "hi"))
    assert ColumnSpec("a", "binned", (1,), labels=("lo", "hi")).bin_of(1) == "hi"


@pytest.mark.parametrize("total", [1 + 5e-10, 1 - 5e-10])
def test_near_normalized_file_accepted(tmp_path, total):
    f = tmp_path / "a.pid"
    f.write_text(f"pid-joint v1\nalphabet S 0\nalphabet Y 0\nalphabet Z 0 1\np 0 0 0 0.5\np 0 0 1 {total - 0.5!r}\n")
    assert load_joint(f).pmf.sum() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "body, line",
    [
        ("alphabet S 0\nalphabet Y 0\nalphabet Z 0\np 0 0 0 0.9\n", None),
        ("alphabet S 0\nalphabet Y 0\nalphabet Z 0\np 0 0 0 abc\n", 5),
        ("alphabet S 0\nalphabet Y 0\nalphabet Z 0\np 0 0 0 -1\n", 5),
        ("alphabet S 0\nalphabet Y 0\np 0 0 1\n", 4),
        ("alphabet S 0\nalphabet Y 0\nalphabet Z 0\np 0 0 9 1\n", 5),
        ("alphabet S 0\nalphabet S 1\n", 3),
        ("bogus\n", 2),
    ],
)
def test_malformed_files(tmp_path, body, line):
    f = tmp_path / "a.pid"
    f.write_text("pid-joint v1\n" + body)
    with pytest.raises(MalformedFile) as exc:
        load_joint(f)
    assert exc.value.line == line


def test_missing_magic(tmp_path):
    f = tmp_path / "a.pid"
    save_joint(gen_copy(2), f)
    f.write_text(f.read_text().replace("v1", "v2"))
    with pytest.raises(MalformedFile):
        load_joint(f)
