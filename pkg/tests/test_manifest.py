from fractions import Fraction

import pytest

from weilgeom.manifest import ManifestError, load, loads
from weilgeom.suite import corpus_manifest, corpus_names

BASE = """
[domain]
coords = x, y
g11 = 1
g12 = 0
g22 = 1
"""


def test_minimal_manifest():
    m = loads(BASE + "[points]\np = 1/2, 3\n")
    assert m.domain.coords == ("x", "y")
    assert m.points == (("p", (Fraction(1, 2), Fraction(3))),)
    assert m.points_in("float64") == [("p", (0.5, 3.0))]
    assert m.map is None and m.mode == "exact"


def test_digest_is_stable_and_content_based():
    a, b = loads(BASE), loads(BASE)
    assert a.digest == b.digest and len(a.digest) == 64
    assert loads(BASE + "\n").digest != a.digest


def test_long_metric_keys():
    text = "[domain]\ncoords = x, y\ng_1_1 = 1\ng_1_2 = 0\ng_2_2 = 1 + x^2\n"
    assert loads(text).domain.sources[(1, 1)] == "1 + x^2"


@pytest.mark.parametrize("text,msg", [
    ("[codomain]\ncoords = u\ng11 = 1\n", "needs a [domain]"),
    (BASE + "[extra]\na = 1\n", "unknown section"),
    ("[domain]\ncoords = x, y\ng11 = 1\ng22 = 1\n", "missing metric entries: g12"),
    ("[domain]\ncoords = x, y\ng11 = 1\ng12 = 0\ng21 = 0\ng22 = 1\n", "below the diagonal"),
    ("[domain]\ncoords = x, y\ng11 = 1\ng12 = 0\ng22 = 1\ng33 = 1\n", "out of range"),
    ("[domain]\ncoords = x, x\ng11 = 1\ng12 = 0\ng22 = 1\n", "distinct"),
    ("[domain]\ncoords = x, y\ndim = 3\ng11 = 1\ng12 = 0\ng22 = 1\n", "dim = 3"),
    ("[domain]\ncoords = x, y\ng11 = 1 +\ng12 = 0\ng22 = 1\n", "expected"),
    ("[domain]\ncoords = x, y\ng11 = z\ng12 = 0\ng22 = 1\n", "z"),
    (BASE + "[map]\nf1 = x\n", "requires a [codomain]"),
    (BASE + "[codomain]\ncoords = u, v\ng11 = 1\ng12 = 0\ng22 = 1\n[map]\nf1 = x\n",
     "1 components"),
    (BASE + "[codomain]\ncoords = u\ng11 = 1\n[map]\nf2 = x\n", "f1..f1"),
    (BASE + "[points]\np = 1\n", "1 coordinates"),
    (BASE + "[points]\np = 1, 1/0\n", "[points] p"),
    (BASE + "[points]\np = 1, abc\n", "[points] p"),
    (BASE + "[functions]\nf = x +* y\n", "[functions] f"),
    (BASE + "[jet]\nvalue = 0\ncovector = 1, 0\n", "missing key"),
    (BASE + "[options]\nmode = quad\n", "mode"),
    (BASE + "[options]\ntol = -1\n", "positive"),
    ("[domain\ncoords = x\n", "<string>"),
])
def test_malformed_manifests(text, msg):
    with pytest.raises(ManifestError) as info:
        loads(text)
    assert msg in str(info.value)


def test_jet_dimension_mismatch():
    m = loads(BASE + "[jet]\nvalue = 0\ncovector = 1, 0, 0\nform = 1, 0; 0, 1\n")
    with pytest.raises(ManifestError):
        m.jet_at((0, 0))
    m = loads(BASE + "[jet]\nvalue = 0\ncovector = 1, 0\nform = 1, 0; 1, 1\n")
    with pytest.raises(ManifestError):
        m.jet_at((0, 0))


def test_missing_file(tmp_path):
    with pytest.raises(ManifestError, match="cannot read"):
        load(tmp_path / "nope.ini")


def test_corpus_loads():
    names = corpus_names()
    assert len(names) >= 15
    for n in names:
        m = corpus_manifest(n)
        assert m.points
        assert m.functions or m.map is not None
