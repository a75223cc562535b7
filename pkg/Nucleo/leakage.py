"""
Fuga de información de un PKS.

La medida principal es la fuga de trazas: para cada traza, la caída de
min-entropía entre su estado inicial y su estado final; la fuga del
programa es su valor esperado. Las medidas de comparación tratan al
programa como un canal clásico cuyas observaciones son el valor final de
O, la secuencia de valores de O, o la secuencia consciente del camino.
"""
import logging
from collections import defaultdict
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple

import numpy as np
from sqlmodel import Field, SQLModel

from Nucleo.dist import fraction_str
from Nucleo.errores import ErrorConfiguracion
from Nucleo.measures import (
    Bits, Channel, channel_from_joint, conditional_min_smith, conditional_shannon,
    entropy_of, expected_min_entropy, min_entropy, shannon_entropy,
)
from Nucleo.pks import Pks, Trace, enumerate_traces, path_key

logger = logging.getLogger(__name__)


class TipoMedida(str, Enum):
    """
    Entropía con la que se mide un canal.

    - SHANNON: incertidumbre promedio (H(S) - H(S|O))
    - MIN: amenaza de un solo intento (min-entropía condicional de Smith)
    """
    SHANNON = "shannon"
    MIN = "min"


def trace_leakage(t: Trace, pks: Pks) -> Bits:
    """Incertidumbre inicial menos incertidumbre final de la traza."""
    inicial = pks.states[t.states[0]].posterior
    final = pks.states[t.final_state].posterior
    return min_entropy(inicial) - min_entropy(final)


def initial_uncertainty(pks: Pks) -> Bits:
    return min_entropy(pks.states[pks.initial].posterior)


def program_leakage(pks: Pks) -> Bits:
    """Valor esperado de la fuga de las trazas: H_min(inicial) - Σ p(T)·H_min(final_T)."""
    finales = [(t.probability, pks.states[t.final_state].posterior) for t in enumerate_traces(pks)]
    return initial_uncertainty(pks) - expected_min_entropy(finales)


# ====================================================================
# CANALES DE COMPARACIÓN
# ====================================================================

Clave = Callable[[Trace], Hashable]


def trace_channel(pks: Pks, clave: Clave) -> Channel:
    """
    Canal del prior a la observación `clave(T)`.

    La masa conjunta de (observación, s) es Σ p(T)·posterior_T(s) sobre las
    trazas con esa observación: el planificador no ve el secreto, así que la
    probabilidad de una traza se factoriza en peso del planificador por la
    masa de los secretos compatibles.
    """
    conjunta: Dict[Tuple[Hashable, int], Fraction] = defaultdict(Fraction)
    for t in enumerate_traces(pks):
        observacion = clave(t)
        for s, p in pks.states[t.final_state].posterior.items():
            conjunta[(observacion, s)] += t.probability * p
    return channel_from_joint(pks.states[pks.initial].posterior, conjunta)


def channel_leakage(ch: Channel, kind: TipoMedida) -> Bits:
    if TipoMedida(kind) is TipoMedida.SHANNON:
        return shannon_entropy(ch.prior) - conditional_shannon(ch)
    return min_entropy(ch.prior) - conditional_min_smith(ch)


def io_leakage(pks: Pks, kind: TipoMedida) -> Bits:
    """Fuga clásica de entrada/salida: solo se observa el valor final de O."""
    return channel_leakage(trace_channel(pks, lambda t: t.observable_o_sequence[-1]), kind)


def trace_obs_leakage(pks: Pks, kind: TipoMedida) -> Bits:
    """Fuga clásica cuando se observa la secuencia de valores de O, sin ver qué hilo corrió."""
    return channel_leakage(trace_channel(pks, lambda t: t.observable_o_sequence), kind)


def path_leakage(pks: Pks, kind: TipoMedida) -> Bits:
    """Fuga clásica cuando además se observan las decisiones del planificador y las ramas."""
    return channel_leakage(trace_channel(pks, lambda t: path_key(t, pks)), kind)


def observable_entropy(pks: Pks) -> Bits:
    """Entropía de Shannon de la distribución de secuencias de valores de O."""
    masas: Dict[Tuple[int, ...], Fraction] = defaultdict(Fraction)
    for t in enumerate_traces(pks):
        masas[t.observable_o_sequence] += t.probability
    return entropy_of(masas.values())


def final_uncertainty_spread(pks: Pks) -> Tuple[Bits, Bits]:
    """Media y varianza (ponderadas por p(T)) de la incertidumbre final de las trazas."""
    trazas = enumerate_traces(pks)
    pesos = np.array([float(t.probability) for t in trazas])
    valores = np.array([min_entropy(pks.states[t.final_state].posterior) for t in trazas])
    media = float(np.average(valores, weights=pesos))
    varianza = float(np.average((valores - media) ** 2, weights=pesos))
    return media + 0.0, varianza + 0.0


MEDIDAS: Dict[str, Callable[[Pks], Bits]] = {
    "io_shannon": partial(io_leakage, kind=TipoMedida.SHANNON),
    "io_min": partial(io_leakage, kind=TipoMedida.MIN),
    "trace_obs_shannon": partial(trace_obs_leakage, kind=TipoMedida.SHANNON),
    "trace_obs_min": partial(trace_obs_leakage, kind=TipoMedida.MIN),
    "path_shannon": partial(path_leakage, kind=TipoMedida.SHANNON),
    "path_min": partial(path_leakage, kind=TipoMedida.MIN),
}


# ====================================================================
# REPORTE
# ====================================================================

class TraceRow(SQLModel):
    """
    Fila por traza del reporte.

    Attributes:
        id: Identificador de la traza
        probability: Probabilidad exacta "num/den"
        final_uncertainty: Min-entropía de la creencia final
        leakage: Fuga de la traza
        o_sequence: Valores de O a lo largo de la traza
    """
    id: int
    probability: str
    final_uncertainty: float
    leakage: float
    o_sequence: List[int] = Field(default_factory=list)


class LeakageReport(SQLModel):
    """Resultado completo del análisis de un programa bajo un planificador."""
    program: str
    scheduler: str
    initial_uncertainty: float
    traces: List[TraceRow] = Field(default_factory=list)
    expected_leakage: float
    comparisons: Dict[str, float] = Field(default_factory=dict)
    final_uncertainty_mean: float = 0.0
    final_uncertainty_variance: float = 0.0


def validar_medidas(measures: Optional[Iterable[str]]) -> List[str]:
    """
    Nombres de medidas a calcular, en el orden canónico; None significa todas.

    Raises:
        ErrorConfiguracion: Si se pide una medida desconocida
    """
    if measures is None:
        return list(MEDIDAS)
    pedidas = set(measures)
    desconocidas = sorted(pedidas - set(MEDIDAS))
    if desconocidas:
        raise ErrorConfiguracion(
            f"medida desconocida: {', '.join(desconocidas)} (disponibles: {', '.join(MEDIDAS)})"
        )
    return [m for m in MEDIDAS if m in pedidas]


def build_report(pks: Pks, program: str, scheduler: Optional[str] = None,
                 measures: Optional[Iterable[str]] = None) -> LeakageReport:
    """Calcula la fuga de trazas y las medidas de comparación pedidas."""
    nombres = validar_medidas(measures)
    inicial = initial_uncertainty(pks)
    filas = []
    for t in enumerate_traces(pks):
        final = min_entropy(pks.states[t.final_state].posterior)
        filas.append(TraceRow(
            id=t.id,
            probability=fraction_str(t.probability),
            final_uncertainty=final,
            leakage=inicial - final,
            o_sequence=list(t.observable_o_sequence),
        ))
    media, varianza = final_uncertainty_spread(pks)
    reporte = LeakageReport(
        program=program,
        scheduler=scheduler or pks.scheduler,
        initial_uncertainty=inicial,
        traces=filas,
        expected_leakage=program_leakage(pks),
        comparisons={m: MEDIDAS[m](pks) for m in nombres},
        final_uncertainty_mean=media,
        final_uncertainty_variance=varianza,
    )
    logger.info("Reporte de %s (%s): fuga esperada %.6f bits en %d trazas",
                program, reporte.scheduler, reporte.expected_leakage, len(filas))
    return reporte
