from fractions import Fraction

import pytest

from Nucleo.dist import (
    SecretDist, condition, fraction_str, from_json, is_uniform, mass, max_prob, parse_fraction,
    probability, support, to_json, uniform,
)
from Nucleo.errores import ErrorDistribucion, EventoImposible


def test_uniforme():
    d = uniform(range(8))
    assert len(d) == 8
    assert all(p == Fraction(1, 8) for p in d.values())
    assert is_uniform(d)
    assert max_prob(d) == Fraction(1, 8)


def test_entradas_cero_se_descartan():
    d = SecretDist({0: Fraction(1, 2), 1: 0, 2: Fraction(1, 2)})
    assert support(d) == (0, 2)
    assert probability(d, 1) == 0


@pytest.mark.parametrize("masas", [
    {0: Fraction(1, 2)},
    {0: Fraction(3, 2), 1: Fraction(-1, 2)},
    {-1: 1},
    {},
])
def test_distribuciones_invalidas(masas):
    with pytest.raises(ErrorDistribucion):
        SecretDist(masas)


def test_condicionar_bits_pares():
    d, m = condition(uniform(range(8)), lambda s: s % 2 == 0)
    assert m == Fraction(1, 2)
    assert d == SecretDist({0: Fraction(1, 4), 2: Fraction(1, 4), 4: Fraction(1, 4), 6: Fraction(1, 4)})


def test_condicionar_sobre_todo_el_soporte_devuelve_lo_mismo():
    d = uniform(range(4))
    assert condition(d, lambda s: True) == (d, 1)


def test_condicionar_evento_imposible():
    with pytest.raises(EventoImposible):
        condition(uniform(range(4)), lambda s: s > 10)


def test_bayes_exacto():
    d = SecretDist({0: Fraction(1, 6), 1: Fraction(1, 3), 2: Fraction(1, 2)})
    posterior, m = condition(d, lambda s: s != 1)
    assert m == mass(d, lambda s: s != 1) == Fraction(2, 3)
    for s in posterior:
        assert m * posterior[s] == d[s]


def test_no_uniforme():
    assert not is_uniform(SecretDist({0: Fraction(1, 3), 1: Fraction(2, 3)}))


def test_formato_fraccion():
    assert fraction_str(Fraction(1, 4)) == "1/4"
    assert fraction_str(Fraction(1)) == "1/1"
    assert parse_fraction("0.25") == Fraction(1, 4)
    with pytest.raises(ErrorDistribucion):
        parse_fraction("uno")


def test_json():
    d = SecretDist({1: Fraction(1, 3), 5: Fraction(2, 3)})
    assert to_json(d) == {"1": "1/3", "5": "2/3"}
    assert from_json({"1": "1/3", "5": "2/3"}) == d
    with pytest.raises(ErrorDistribucion):
        from_json({"x": "1/1"})


def test_igualdad_y_hash():
    a = SecretDist({0: Fraction(1, 2), 1: Fraction(1, 2)})
    b = uniform([1, 0])
    assert a == b
    assert hash(a) == hash(b)
    assert repr(a) == "{0 ↦ 1/2, 1 ↦ 1/2}"
