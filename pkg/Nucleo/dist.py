"""
Distribuciones finitas y exactas sobre los valores del secreto.

Las probabilidades son fractions.Fraction: numerador y denominador
enteros de precisión arbitraria, siempre reducidos. Los logaritmos se
aplican recién en Nucleo.measures.
"""
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Tuple, Union

from Nucleo.errores import ErrorDistribucion, EventoImposible

Predicado = Callable[[int], bool]


def fraction_str(p: Fraction) -> str:
    """Formato exacto "num/den" (también para enteros: "1/1")."""
    p = Fraction(p)
    return f"{p.numerator}/{p.denominator}"


def parse_fraction(texto: Union[str, int, Fraction]) -> Fraction:
    """Lee "num/den", un entero o un decimal exacto ("0.25")."""
    try:
        return Fraction(texto)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ErrorDistribucion(f"probabilidad inválida: {texto!r}") from None


class SecretDist(Mapping[int, Fraction]):
    """
    Creencia del atacante sobre el secreto: valor -> probabilidad.

    Inmutable. Las entradas con probabilidad 0 se descartan al construir,
    todas las restantes son positivas y suman exactamente 1.
    """

    __slots__ = ("_masas", "_hash")

    def __init__(self, masas: Mapping[int, Union[Fraction, int, str]]):
        limpias: Dict[int, Fraction] = {}
        for valor, p in masas.items():
            if not isinstance(valor, int) or valor < 0:
                raise ErrorDistribucion(f"valor de secreto inválido: {valor!r}")
            p = parse_fraction(p)
            if p < 0:
                raise ErrorDistribucion(f"probabilidad negativa para {valor}: {p}")
            if p > 0:
                limpias[valor] = p
        if not limpias:
            raise ErrorDistribucion("la distribución no tiene soporte")
        total = sum(limpias.values())
        if total != 1:
            raise ErrorDistribucion(f"las probabilidades suman {total}, no 1")
        self._masas = dict(sorted(limpias.items()))
        self._hash = hash(frozenset(self._masas.items()))

    def __getitem__(self, valor: int) -> Fraction:
        return self._masas[valor]

    def __iter__(self) -> Iterator[int]:
        return iter(self._masas)

    def __len__(self) -> int:
        return len(self._masas)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, SecretDist):
            return self._masas == other._masas
        return NotImplemented

    def __repr__(self) -> str:
        entradas = ", ".join(f"{v} ↦ {p}" for v, p in self._masas.items())
        return "{" + entradas + "}"


def uniform(domain: Iterable[int]) -> SecretDist:
    """Distribución uniforme; el prior por defecto del análisis."""
    valores = sorted(set(domain))
    if not valores:
        raise ErrorDistribucion("el dominio del secreto no puede ser vacío")
    p = Fraction(1, len(valores))
    return SecretDist({v: p for v in valores})


def mass(d: SecretDist, keep: Predicado) -> Fraction:
    """Probabilidad del evento {s : keep(s)} bajo d."""
    return sum((p for s, p in d.items() if keep(s)), Fraction(0))


def condition(d: SecretDist, keep: Predicado) -> Tuple[SecretDist, Fraction]:
    """
    Condicionamiento bayesiano de d sobre el evento {s : keep(s)}.

    Returns:
        La restricción renormalizada y la masa del evento, que es la
        probabilidad de la rama de observación correspondiente.

    Raises:
        EventoImposible: Si ningún valor del soporte satisface keep
    """
    restringida = {s: p for s, p in d.items() if keep(s)}
    masa = sum(restringida.values(), Fraction(0))
    if masa == 0:
        raise EventoImposible("condicionamiento sobre un evento de masa cero (observación inalcanzable)")
    if masa == 1:
        return d, masa
    return SecretDist({s: p / masa for s, p in restringida.items()}), masa


def max_prob(d: SecretDist) -> Fraction:
    """Vulnerabilidad: probabilidad máxima sobre el soporte."""
    return max(d.values())


def support(d: SecretDist) -> Tuple[int, ...]:
    return tuple(d)


def probability(d: SecretDist, s: int) -> Fraction:
    return d.get(s, Fraction(0))


def is_uniform(d: SecretDist) -> bool:
    return len(set(d.values())) == 1


def to_json(d: SecretDist) -> Dict[str, str]:
    """{"valor": "num/den"}, sin flotantes."""
    return {str(s): fraction_str(p) for s, p in d.items()}


def from_json(obj: Mapping[str, str]) -> SecretDist:
    try:
        return SecretDist({int(s): parse_fraction(p) for s, p in obj.items()})
    except ValueError as e:
        if isinstance(e, ErrorDistribucion):
            raise
        raise ErrorDistribucion(f"clave de secreto inválida: {e}") from None
