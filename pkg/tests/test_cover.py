import pytest

from locald.cover import (
    CoverInput,
    ExplicitFamily,
    GeneratedFamily,
    bits_to_text,
    decode_family,
    member_containment,
    member_cover,
    text_to_bits,
    views_of,
)
from locald.errors import MalformedInput
from locald.graph import Configuration, IdAssignment, path_graph

A, B, C = "0", "1", "10"


def cover_config(*cells):
    return Configuration(path_graph(len(cells)), tuple(c.encode() for c in cells))


def test_cover_examples():
    assert member_cover(cover_config(CoverInput.explicit(A, [{A}])))
    assert not member_cover(cover_config(CoverInput.explicit(A, [{A}]), CoverInput.explicit(B, [{B}])))
    superset = cover_config(CoverInput.explicit(A, [{A, B, C}]), CoverInput.explicit(B, []))
    assert not member_cover(superset)
    assert member_containment(superset)
    assert not member_containment(cover_config(CoverInput.explicit(A, [set()])))


def test_cover_implies_containment():
    for cells in (
        [CoverInput.explicit(A, [{A, B}]), CoverInput.explicit(B, [{B}])],
        [CoverInput.explicit(A, [{A}]), CoverInput.explicit(A, [])],
    ):
        config = cover_config(*cells)
        if member_cover(config):
            assert member_containment(config)


def test_malformed_cell():
    with pytest.raises(MalformedInput):
        member_cover(Configuration(path_graph(1), ("1",)))


def test_family_codecs():
    fam = ExplicitFamily.of([{A, B}, set()])
    assert decode_family(fam.encode()) == fam
    gen = GeneratedFamily("coloring", 1, 4)
    assert decode_family(gen.encode()) == gen
    assert bits_to_text(text_to_bits("coloring")) == "coloring"


def test_explicit_find_superset():
    fam = ExplicitFamily.of([{A, B, C}, {A, B}])
    assert fam.find_superset(frozenset({A})) == frozenset({A, B})
    assert fam.find_superset(frozenset({"11"})) is None


def test_generated_family_membership():
    fam = GeneratedFamily("coloring", 1, 4)
    good = Configuration(path_graph(2), ("0", "1"))
    ids = IdAssignment((1, 2))
    views = views_of(good, ids, 1)
    assert fam.contains(views)
    assert fam.find_superset(frozenset(list(views)[:1])) is not None
    bad = Configuration(path_graph(2), ("1", "1"))
    assert not fam.contains(views_of(bad, ids, 1))
    # Identities beyond the bound fall outside the family.
    assert not fam.contains(views_of(good, IdAssignment((1, 16)), 1))


def test_generated_family_matches_materialized():
    fam = GeneratedFamily("coloring", 1, 2)
    explicit = fam.materialize()
    assert explicit.sets
    for s in explicit.sets:
        assert fam.contains(s)
    assert len(explicit.sets) == len(set(fam.iter_sets()))
