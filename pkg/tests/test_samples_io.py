import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pentagram.coords import ABCoords, XYCoords
from pentagram.errors import GenerationFailed, IndivisibilityViolated, UnsupportedN
from pentagram.io import PolygonFile, PolygonFileError, decode_complex, encode_complex
from pentagram.polygon import VertexChain
from pentagram.samples import (
    random_ab,
    random_closed_chain,
    random_twisted_chain,
    random_xy,
    regular_chain,
    rng_for,
)
from pentagram.spectral import is_closed


def test_rng_is_deterministic_per_index():
    assert np.array_equal(rng_for(3, 0).standard_normal(5), rng_for(3, 0).standard_normal(5))
    assert not np.array_equal(rng_for(3, 0).standard_normal(5), rng_for(3, 1).standard_normal(5))
    assert not np.array_equal(rng_for(3).standard_normal(5), rng_for(4).standard_normal(5))


@pytest.mark.parametrize("gen", [random_xy, random_ab, random_twisted_chain, random_closed_chain])
def test_generators_repeatable(gen):
    n = 7
    one, two = gen(n, 11), gen(n, 11)
    if isinstance(one, VertexChain):
        assert np.array_equal(one.vectors, two.vectors)
        assert np.array_equal(one.monodromy, two.monodromy)
    elif isinstance(one, XYCoords):
        assert np.array_equal(one.x, two.x) and np.array_equal(one.y, two.y)
    else:
        assert np.array_equal(one.a, two.a) and np.array_equal(one.b, two.b)
    assert not one.validity_issues()


def test_sample_domains():
    with pytest.raises(IndivisibilityViolated):
        random_ab(6, 0)
    with pytest.raises(UnsupportedN):
        random_closed_chain(4, 0)


def test_generation_gives_up(monkeypatch):
    from pentagram import samples

    monkeypatch.setattr(samples, "CHAIN_MARGIN", 10.0)
    with pytest.raises(GenerationFailed):
        samples.random_closed_chain(6, 0)


def test_closed_and_twisted_samples():
    assert is_closed(random_closed_chain(6, 2))
    assert not is_closed(random_twisted_chain(6, 2))
    assert is_closed(regular_chain(7))


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False), min_size=1, max_size=8))
def test_complex_encoding_roundtrip(values):
    assert np.array_equal(decode_complex(encode_complex(values)), np.array(values, dtype=complex))


@pytest.mark.parametrize(
    "obj",
    [random_xy(5, 1), random_ab(7, 1), random_twisted_chain(6, 1), random_closed_chain(5, 1)],
    ids=["xy", "ab", "twisted", "closed"],
)
def test_polygon_file_roundtrip(obj, tmp_path):
    pf = PolygonFile.from_object(obj, seed=1)
    path = tmp_path / "p.json"
    pf.write(path)
    back = PolygonFile.read(path).to_object()
    assert type(back) is type(obj)
    if isinstance(obj, VertexChain):
        assert np.array_equal(back.vectors, obj.vectors)
        assert np.array_equal(back.monodromy, obj.monodromy)
    elif isinstance(obj, XYCoords):
        assert np.array_equal(back.x, obj.x) and np.array_equal(back.y, obj.y)
    else:
        assert np.array_equal(back.a, obj.a) and np.array_equal(back.b, obj.b)
    assert PolygonFile.read(path).seed == 1


def test_unknown_fields_survive():
    d = PolygonFile.from_object(random_xy(4, 0)).to_dict()
    d["note"] = "kept"
    assert json.loads(PolygonFile.from_dict(d).dumps())["note"] == "kept"


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("kind"),
        lambda d: d.update(schema_version="99"),
        lambda d: d.update(kind="hexagon"),
        lambda d: d.update(n=9),
        lambda d: d["data"].pop("x"),
        lambda d: d.update(monodromy=[[[1, 0]] * 3] * 3),
        lambda d: d["data"].update(x=[1, 2, 3, 4]),
    ],
)
def test_bad_files(mutate):
    d = PolygonFile.from_object(random_xy(4, 0)).to_dict()
    mutate(d)
    with pytest.raises(PolygonFileError):
        PolygonFile.from_dict(d).to_object()


def test_not_json():
    with pytest.raises(PolygonFileError):
        PolygonFile.loads("{nope")


def test_cannot_store_other_types():
    with pytest.raises(TypeError):
        PolygonFile.from_object([1, 2, 3])


def test_ab_file_reads_as_abcoords():
    pf = PolygonFile.from_object(ABCoords(np.ones(4), 2 * np.ones(4)))
    assert pf.kind == "ab"
    assert np.array_equal(pf.to_object().b, 2 * np.ones(4))
