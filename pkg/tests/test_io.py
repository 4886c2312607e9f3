import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ballfield import io as bio


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips_floats(x):
    assert float(bio.fmt(x)) == x


def test_fmt_types():
    assert bio.fmt(True) == "true"
    assert bio.fmt(np.int64(3)) == "3"
    assert bio.fmt("abc") == "abc"
    assert bio.fmt(0.1) == "0.10000000000000001"


def test_csv_round_trip(tmp_path):
    rows = [[1, 0.1, "x"], [2, -3.5e-300, "y"]]
    bio.write_csv(tmp_path / "t.csv", ["k", "v", "s"], rows)
    header, back = bio.read_csv(tmp_path / "t.csv")
    assert header == ["k", "v", "s"]
    assert back == [[1.0, 0.1, "x"], [2.0, -3.5e-300, "y"]]


def test_parse_range():
    assert bio.parse_range("0.1:1:0.1") == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
    assert bio.parse_range("-0.7:0.7:0.7") == [-0.7, 0.0, 0.7]
    assert bio.parse_range("2.5") == [2.5]
    for bad in ("1:0:0.1", "0:1:0", "0:1", "abc"):
        with pytest.raises(ValueError):
            bio.parse_range(bad)


def test_parse_points(tmp_path):
    np.testing.assert_array_equal(bio.parse_points("0,0,0.5; 0.1,0.2,0.3"), [[0, 0, 0.5], [0.1, 0.2, 0.3]])
    bio.write_csv(tmp_path / "p.csv", ["z", "y", "x"], [[3, 2, 1]])
    np.testing.assert_array_equal(bio.parse_points(str(tmp_path / "p.csv")), [[1, 2, 3]])
    with pytest.raises(ValueError):
        bio.parse_points("1,2")
    with pytest.raises(ValueError):
        bio.parse_points(";")


def test_read_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# params\nsigma2 = 2\nspectrum-file=x.json  # trailing\n\n")
    assert bio.read_config(path) == {"sigma2": "2", "spectrum_file": "x.json"}
    path.write_text("novalue\n")
    with pytest.raises(ValueError):
        bio.read_config(path)


def test_manifest_round_trip(tmp_path):
    (tmp_path / "a.csv").write_text("x\n1\n")
    m = bio.RunManifest("spectrum", "matern_sphere", {"a": 10.0}, ["spectrum", "--a", "10"], seed=3)
    m.add_output(tmp_path / "a.csv")
    m.unhashed.append("a.png")
    path = m.write(tmp_path)
    back = bio.RunManifest.read(path)
    assert back.outputs == {"a.csv": bio.sha256(tmp_path / "a.csv")}
    assert back.argv == ["spectrum", "--a", "10"]
    assert back.unhashed == ["a.png"]
    assert back.timestamp and back.environment["numpy"] == np.__version__
