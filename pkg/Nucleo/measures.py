"""
Medidas de entropía en bits.

Toda la aritmética de masas es exacta (Fraction); el logaritmo se aplica
al final con numpy. Se compara con tolerancia TOLERANCIA.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from Nucleo.dist import SecretDist, max_prob
from Nucleo.errores import ErrorDistribucion

Bits = float
TOLERANCIA = 1e-9


@dataclass(frozen=True)
class Channel:
    """
    Canal de entrada/salida: prior sobre S y filas p(o|s).

    Attributes:
        prior: Distribución previa del secreto
        rows: observable -> (secreto -> p(o|s)); los observables son tokens
            comparables (valores finales de O o secuencias de valores)
    """
    prior: SecretDist
    rows: Mapping[Hashable, Mapping[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        for s in self.prior:
            total = sum((fila.get(s, Fraction(0)) for fila in self.rows.values()), Fraction(0))
            if total != 1:
                raise ErrorDistribucion(f"la fila del secreto {s} suma {total}, no 1")

    def outcomes(self) -> List[Hashable]:
        """Observables en orden lexicográfico (reportes reproducibles)."""
        return sorted(self.rows)

    def joint(self, o: Hashable) -> Dict[int, Fraction]:
        """p(s, o) para cada secreto del soporte."""
        fila = self.rows[o]
        return {s: p * fila[s] for s, p in self.prior.items() if fila.get(s, 0) > 0}


def _log2(p: Fraction) -> float:
    return float(np.log2(float(p)))


def entropy_of(masses: Iterable[Fraction]) -> Bits:
    """Entropía de Shannon de una distribución finita cualquiera (0·log 0 = 0)."""
    P = np.ma.masked_equal(np.array([float(m) for m in masses], dtype=float), 0)
    return float(-np.ma.sum(P * np.ma.log2(P))) + 0.0


def shannon_entropy(d: SecretDist) -> Bits:
    return entropy_of(d.values())


def min_entropy(d: SecretDist) -> Bits:
    """Min-entropía de Rényi: -log2 max_s p(s)."""
    return -_log2(max_prob(d)) + 0.0


def conditional_shannon(ch: Channel) -> Bits:
    """H(S|O) = Σ_o p(o) · H(S | O = o)."""
    total = 0.0
    for o in ch.outcomes():
        conjunta = ch.joint(o)
        p_o = sum(conjunta.values(), Fraction(0))
        if p_o == 0:
            continue
        total += float(p_o) * entropy_of(p / p_o for p in conjunta.values())
    return total + 0.0


def vulnerability(ch: Channel) -> Fraction:
    """Σ_o p(o) · max_s p(s|o) = Σ_o max_s p(s, o), exacto."""
    return sum((max(ch.joint(o).values(), default=Fraction(0)) for o in ch.outcomes()), Fraction(0))


def conditional_min_smith(ch: Channel) -> Bits:
    """Min-entropía condicional de Smith: -log2 de la vulnerabilidad posterior esperada."""
    return -_log2(vulnerability(ch)) + 0.0


def expected_min_entropy(weighted: Sequence[Tuple[Fraction, SecretDist]]) -> Bits:
    """
    Σ w_i · H_min(d_i), la incertidumbre final esperada.

    Raises:
        ErrorDistribucion: Si los pesos no suman exactamente 1
    """
    total = sum((Fraction(w) for w, _ in weighted), Fraction(0))
    if total != 1:
        raise ErrorDistribucion(f"los pesos suman {total}, no 1")
    return sum(float(w) * min_entropy(d) for w, d in weighted) + 0.0


def channel_from_joint(prior: SecretDist, joint: Mapping[Tuple[Hashable, int], Fraction]) -> Channel:
    """Arma el canal a partir de las masas conjuntas p(o, s)."""
    filas: Dict[Hashable, Dict[int, Fraction]] = {}
    for (o, s), p in joint.items():
        if p == 0:
            continue
        fila = filas.setdefault(o, {})
        fila[s] = fila.get(s, Fraction(0)) + p / prior[s]
    return Channel(prior=prior, rows=filas)
