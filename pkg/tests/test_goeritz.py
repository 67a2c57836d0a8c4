import math

import pytest

from essence_kit.diagram import BLACK, COLORS, WHITE
from essence_kit.errors import HypothesisError
from essence_kit.generators import random_alternating_diagram
from essence_kit.goeritz import (
    GoeritzForm,
    definite_form,
    exhaustive_form_minimum,
    form_minimum,
    goeritz_matrix,
    is_positive_definite,
)
from essence_kit.graphs import girth, tait_graph


def test_trefoil_black_form(trefoil):
    form = goeritz_matrix(trefoil, BLACK)
    assert form.matrix == ((2, -1), (-1, 2))
    assert form.sign_convention == (1, 1, 1)
    assert is_positive_definite(form)
    assert form_minimum(form) == 2


def test_trefoil_white_form_is_negated(trefoil):
    form = goeritz_matrix(trefoil, WHITE)
    assert form.matrix == ((-3,),)
    assert not is_positive_definite(form)
    definite = definite_form(form)
    assert definite.negated and definite.matrix == ((3,),)
    assert form_minimum(definite) == 3


def test_form_minimum_needs_definite_form():
    with pytest.raises(HypothesisError):
        form_minimum(GoeritzForm(((1, 2), (2, 1)), BLACK))
    with pytest.raises(HypothesisError):
        definite_form(GoeritzForm(((1, 0), (0, -1)), BLACK))


def test_known_lattice_minima():
    # A2 root lattice scaled by 2 and the D4 root lattice
    assert form_minimum(GoeritzForm(((4, -2), (-2, 4)), BLACK)) == 4
    d4 = ((2, -1, 0, 0), (-1, 2, -1, -1), (0, -1, 2, 0), (0, -1, 0, 2))
    assert form_minimum(GoeritzForm(d4, BLACK)) == 2
    assert form_minimum(GoeritzForm((), BLACK)) == math.inf


def test_minimum_matches_exhaustive_search(rng):
    for _ in range(10):
        d = random_alternating_diagram(rng.randint(2, 5), rng)
        for color in COLORS:
            form = definite_form(goeritz_matrix(d, color))
            if form.n and form.n <= 3:
                assert form_minimum(form) == exhaustive_form_minimum(form, 3)


def test_minimum_is_tait_girth(rng):
    for _ in range(25):
        d = random_alternating_diagram(rng.randint(2, 9), rng)
        for color in COLORS:
            assert form_minimum(definite_form(goeritz_matrix(d, color))) == girth(tait_graph(d, color))


def test_goeritz_needs_reduced_diagram(fixture):
    with pytest.raises(HypothesisError) as err:
        goeritz_matrix(fixture("kink"), BLACK)
    assert err.value.failed == ("reduced",)


def test_hopf_definite_form(fixture):
    hopf = fixture("hopf")
    for color in COLORS:
        form = definite_form(goeritz_matrix(hopf, color))
        assert form.matrix == ((2,),)
        assert form_minimum(form) == 2
