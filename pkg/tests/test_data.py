import math

import numpy as np
import pytest

from ldpfreq import data
from ldpfreq.core import EmptyInput, IndexOutOfDomain, LdpError
from ldpfreq.data import (
    ColumnNotFound,
    Dataset,
    DatasetUnavailable,
    EmptyColumn,
    InvalidSpec,
    RaggedRow,
    SyntheticSpec,
    dataset_sizes_table,
    generate_synthetic,
    ingest_csv,
    read_dataset,
    write_dataset,
)
from ldpfreq.core import Domain


def write(tmp_path, text, name="toy.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_ingest_toy(tmp_path):
    ds = ingest_csv(write(tmp_path, "a\nb\na\n"), 0)
    assert ds.labels == ["a", "b"]
    assert ds.values.tolist() == [0, 1, 0]
    assert ds.d == 2 and ds.n == 3
    assert ds.name == "toy"


def test_ingest_header_trim_and_missing_token(tmp_path):
    path = write(tmp_path, "id, colour\n1, red\n2,  ?\n3,blue \n4, red\n")
    ds = ingest_csv(path, "colour", has_header=True)
    assert ds.labels == ["?", "blue", "red"]
    assert ds.values.tolist() == [2, 0, 1, 2]
    assert ds.attribute == "colour"
    raw = ingest_csv(path, 1, has_header=True, trim=False)
    assert " red" in raw.labels and "blue " in raw.labels


def test_ingest_whitespace_delimiter(tmp_path):
    ds = ingest_csv(write(tmp_path, "1 x 3\n2  y 3\n\n1 x 4\n"), 1, delimiter=None)
    assert ds.values.tolist() == [0, 1, 0]


def test_ingest_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        ingest_csv(tmp_path / "missing.csv", 0)
    with pytest.raises(ColumnNotFound):
        ingest_csv(write(tmp_path, "a,b\nc,d\n"), 2)
    with pytest.raises(ColumnNotFound):
        ingest_csv(write(tmp_path, "h1,h2\nc,d\n"), "h3", has_header=True)
    with pytest.raises(RaggedRow):
        ingest_csv(write(tmp_path, "a,b\nc\n"), 0)
    with pytest.raises(EmptyColumn):
        ingest_csv(write(tmp_path, "\n\n"), 0)
    with pytest.raises(EmptyColumn):
        ingest_csv(write(tmp_path, "a\na\n"), 0)


def test_dataset_validation():
    with pytest.raises(IndexOutOfDomain):
        Dataset("x", [0, 3], Domain(3))
    with pytest.raises(EmptyInput):
        Dataset("x", [], Domain(3))
    ds = Dataset("x", [0, 2, 2, 1], Domain(3))
    assert ds.distribution().tolist() == [0.25, 0.25, 0.5]
    with pytest.raises(ValueError):
        ds.values[0] = 1


def test_synthetic_geometric_two_values():
    spec = SyntheticSpec(n=10**5, d=2, rho=0.5, seed=3)
    np.testing.assert_allclose(spec.weights(), [2 / 3, 1 / 3])
    ds = generate_synthetic(spec)
    share = (ds.values == 0).mean()
    assert abs(share - 2 / 3) <= 3 * math.sqrt(2 / 9 / 10**5)


def test_synthetic_weights():
    w = SyntheticSpec(n=1, d=10, rho=0.3).weights()
    ratio = w[1:] / w[:-1]
    np.testing.assert_allclose(ratio, 0.7)
    assert w.sum() == pytest.approx(1)
    np.testing.assert_allclose(SyntheticSpec(n=1, d=5, rho=1e-12).weights(), 0.2)
    assert SyntheticSpec(n=1, d=100).rho == pytest.approx(0.02)


def test_synthetic_determinism():
    a = generate_synthetic(SyntheticSpec(n=5000, d=7, rho=0.2, seed=11))
    b = generate_synthetic(SyntheticSpec(n=5000, d=7, rho=0.2, seed=11))
    c = generate_synthetic(SyntheticSpec(n=5000, d=7, rho=0.2, seed=12))
    assert a.values.tobytes() == b.values.tobytes()
    assert a.values.tobytes() != c.values.tobytes()


@pytest.mark.parametrize(
    "kwargs", [dict(n=0, d=3), dict(n=10, d=1), dict(n=10, d=3, rho=0.0), dict(n=10, d=3, rho=1.0), dict(n=2.5, d=3)]
)
def test_synthetic_invalid(kwargs):
    with pytest.raises(InvalidSpec):
        SyntheticSpec(**kwargs)


def test_dataset_file_round_trip(tmp_path):
    ds = generate_synthetic(SyntheticSpec(n=300, d=6, rho=0.4, seed=1))
    write_dataset(ds, tmp_path / "a.txt")
    back = read_dataset(tmp_path / "a.txt")
    assert back.name == ds.name and back.d == ds.d
    assert np.array_equal(back.values, ds.values)
    write_dataset(back, tmp_path / "b.txt")
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()


def test_dataset_file_errors(tmp_path):
    bad = write(tmp_path, '{"d":2,"labels":["0","1"],"n":3,"name":"x"}\n0\n1\n', "bad.txt")
    with pytest.raises(LdpError):
        read_dataset(bad)
    with pytest.raises(LdpError):
        read_dataset(write(tmp_path, "not json\n", "junk.txt"))


# --- benchmark datasets ------------------------------------------------------


@pytest.mark.parametrize("attribute, d", [("A4", 3), ("A6", 8), ("A5", 14)])
def test_statlog_attributes(statlog_path, attribute, d):
    ds = data.load_known("statlog", attribute, statlog_path.parent)
    assert (ds.n, ds.d, ds.attribute) == (690, d, attribute)


@pytest.mark.parametrize("attribute, d", [("Race", 5), ("Occ", 15), ("Country", 42)])
def test_adult_attributes(adult_path, attribute, d):
    ds = data.load_known("adult", attribute, adult_path.parent)
    assert (ds.n, ds.d) == (32561, d)
    assert "?" in ds.labels or attribute == "Race"


def test_sizes_table(statlog_path, adult_path):
    rows = dataset_sizes_table(
        [data.load_known("statlog", "A4", statlog_path.parent), data.load_known("adult", "Country", adult_path.parent)]
    )
    assert rows == [("Statlog", 690, "A4", 3), ("Adult", 32561, "Country", 42)]


def test_cached_files_match_recorded_digests(statlog_path, adult_path):
    assert data.verify_file("statlog", statlog_path) in data.KNOWN["statlog"].checksums
    assert data.verify_file("adult", adult_path) in data.KNOWN["adult"].checksums


def test_unknown_attribute(statlog_path):
    with pytest.raises(ColumnNotFound):
        data.load_known("statlog", "A99", statlog_path.parent)
    with pytest.raises(LdpError):
        data.load_known("nope", "A4")


def test_layout_check_rejects_foreign_files(tmp_path):
    write(tmp_path, "1 2 3\n", "australian.dat")
    with pytest.raises(DatasetUnavailable):
        data.verify_file("statlog", tmp_path / "australian.dat")


def test_missing_without_download(tmp_path):
    assert data.locate("uscensus1990", tmp_path) is None
    with pytest.raises(DatasetUnavailable):
        data.load_known("uscensus1990", "PoB", tmp_path, download=False)


def test_fetch_falls_back_and_reports_failures(tmp_path, monkeypatch):
    def offline(url, timeout=60):
        raise OSError("network unreachable")

    monkeypatch.setattr(data, "_download", offline)
    with pytest.raises(DatasetUnavailable, match="network unreachable"):
        data.fetch("adult", tmp_path)


def test_uscensus_when_present():
    path = data.locate("uscensus1990")
    if path is None:
        pytest.skip("USCensus1990raw.data.txt is not cached")
    ds = data.load_known("uscensus1990", "PoB", download=False)
    assert (ds.n, ds.d) == (2458285, 283)
