"""
Planificadores probabilísticos.

Un planificador decide, dada la historia pública de la ejecución (hilos
elegidos y valores de O), con qué probabilidad se ejecuta cada hilo
habilitado. Nunca ve el secreto ni la creencia del atacante.
"""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Literal, Sequence, Tuple, Union

from pydantic import ValidationError, field_validator, model_validator
from sqlmodel import Field, SQLModel

from Nucleo.dist import parse_fraction
from Nucleo.errores import ErrorDistribucion, ErrorPlanificador

logger = logging.getLogger(__name__)

Decision = List[Tuple[Fraction, int]]


@dataclass(frozen=True)
class Historia:
    """
    Historia pública hasta el estado actual.

    Attributes:
        threads: Hilos ejecutados, en orden
        o_values: Valores de O en cada estado recorrido, incluido el actual
    """
    threads: Tuple[int, ...] = ()
    o_values: Tuple[int, ...] = ()

    def extend(self, thread: int, o_value: int) -> "Historia":
        return Historia(self.threads + (thread,), self.o_values + (o_value,))


class SchedulerPolicy:
    """Función de decisión con nombre estable para los reportes."""

    def __init__(self, name: str, decidir: Callable[[Historia, Sequence[int]], Decision]):
        self.name = name
        self._decidir = decidir

    def decide(self, historia: Historia, enabled: Sequence[int]) -> Decision:
        """
        Distribución sobre los hilos habilitados; las entradas de peso 0 se descartan.

        Raises:
            ErrorPlanificador: Si la decisión no suma 1 o nombra un hilo no habilitado
        """
        decision = self._decidir(historia, list(enabled))
        total = sum((p for p, _ in decision), Fraction(0))
        if total != 1:
            raise ErrorPlanificador(f"{self.name}: la decisión suma {total}, no 1")
        hilos = [t for _, t in decision]
        if len(set(hilos)) != len(hilos):
            raise ErrorPlanificador(f"{self.name}: hilo repetido en la decisión {hilos}")
        for p, t in decision:
            if p < 0:
                raise ErrorPlanificador(f"{self.name}: peso negativo {p} para el hilo {t}")
            if t not in enabled:
                raise ErrorPlanificador(
                    f"{self.name}: el hilo {t} no está habilitado tras la historia {list(historia.threads)} "
                    f"(habilitados: {list(enabled)})"
                )
        return [(Fraction(p), t) for p, t in decision if p > 0]

    def __repr__(self) -> str:
        return f"SchedulerPolicy({self.name!r})"


def _uniforme(enabled: Sequence[int]) -> Decision:
    return [(Fraction(1, len(enabled)), t) for t in enabled]


def uniform_scheduler() -> SchedulerPolicy:
    """Elige cada hilo habilitado con la misma probabilidad."""
    return SchedulerPolicy("uniform", lambda historia, enabled: _uniforme(enabled))


def priority_scheduler(order: Sequence[Union[int, str]]) -> SchedulerPolicy:
    """
    Ejecuta siempre el hilo habilitado de mayor prioridad.

    Args:
        order: Posiciones en orden de prioridad. "L" es el hilo habilitado
            más a la izquierda, "R" el más a la derecha y un entero k es el
            hilo en la posición k.
    """
    posiciones = []
    for p in order:
        if isinstance(p, str) and p.strip().upper() in ("L", "R"):
            posiciones.append(p.strip().upper())
        elif isinstance(p, int) or (isinstance(p, str) and p.strip().isdigit()):
            posiciones.append(int(p))
        else:
            raise ErrorPlanificador(f"posición de prioridad inválida: {p!r}")
    if not posiciones:
        raise ErrorPlanificador("el orden de prioridad no puede ser vacío")
    if len(set(posiciones)) != len(posiciones):
        raise ErrorPlanificador(f"el orden de prioridad repite posiciones: {list(order)}")

    def decidir(historia: Historia, enabled: Sequence[int]) -> Decision:
        for p in posiciones:
            if p == "L":
                return [(Fraction(1), enabled[0])]
            if p == "R":
                return [(Fraction(1), enabled[-1])]
            if p in enabled:
                return [(Fraction(1), p)]
        return [(Fraction(1), enabled[0])]

    return SchedulerPolicy("priority:" + ",".join(str(p) for p in posiciones), decidir)


# ====================================================================
# PLANIFICADOR POR TABLA
# ====================================================================

def _pesos_exactos(pesos: Dict[int, str]) -> Dict[int, Fraction]:
    exactos = {}
    for hilo, p in pesos.items():
        try:
            exactos[hilo] = parse_fraction(p)
        except ErrorDistribucion as e:
            raise ValueError(str(e)) from None
        if exactos[hilo] < 0:
            raise ValueError(f"peso negativo para el hilo {hilo}: {p}")
    total = sum(exactos.values(), Fraction(0))
    if total != 1:
        raise ValueError(f"los pesos suman {total}, no 1")
    return exactos


class ReglaPlanificador(SQLModel):
    """
    Regla de la tabla: pesos para una historia de hilos exacta.

    Attributes:
        prefix: Hilos ejecutados hasta el estado (la historia completa)
        weights: hilo -> probabilidad "num/den"
    """
    prefix: List[int] = Field(default_factory=list)
    weights: Dict[int, str]

    @field_validator("weights")
    @classmethod
    def validar_pesos(cls, v: Dict[int, str]) -> Dict[int, str]:
        """Los pesos deben ser fracciones no negativas que suman exactamente 1."""
        _pesos_exactos(v)
        return v


class TablaPlanificador(SQLModel):
    """
    Especificación externa de un planificador dependiente de la historia.

    La regla por defecto es obligatoria: "uniform" o un mapa de pesos.
    """
    rules: List[ReglaPlanificador] = Field(default_factory=list)
    default: Union[Literal["uniform"], Dict[int, str]]

    @field_validator("default")
    @classmethod
    def validar_default(cls, v):
        if isinstance(v, dict):
            _pesos_exactos(v)
        return v

    @model_validator(mode="after")
    def validar_prefijos_unicos(self):
        prefijos = [tuple(r.prefix) for r in self.rules]
        if len(set(prefijos)) != len(prefijos):
            raise ValueError("hay reglas con el mismo prefijo")
        return self


def table_scheduler(spec: TablaPlanificador, name: str = "table") -> SchedulerPolicy:
    """Planificador que consulta la tabla por la historia exacta de hilos."""
    reglas = {tuple(r.prefix): _pesos_exactos(r.weights) for r in spec.rules}
    por_defecto = None if spec.default == "uniform" else _pesos_exactos(spec.default)

    def decidir(historia: Historia, enabled: Sequence[int]) -> Decision:
        pesos = reglas.get(historia.threads, por_defecto)
        if pesos is None:
            return _uniforme(enabled)
        return sorted(((p, t) for t, p in pesos.items()), key=lambda d: d[1])

    return SchedulerPolicy(name, decidir)


def load_table_spec(texto: str) -> TablaPlanificador:
    """
    Lee una tabla en JSON.

    Raises:
        ErrorPlanificador: JSON inválido o tabla mal formada
    """
    try:
        return TablaPlanificador.model_validate(json.loads(texto))
    except json.JSONDecodeError as e:
        raise ErrorPlanificador(f"tabla de planificador con JSON inválido: {e}") from None
    except ValidationError as e:
        errores = "; ".join(f"{'.'.join(str(x) for x in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ErrorPlanificador(f"tabla de planificador inválida: {errores}") from None


def parse_scheduler(texto: str) -> SchedulerPolicy:
    """
    Lee la opción de planificador: `uniform`, `priority:L,R` o `table:RUTA`.

    Raises:
        ErrorPlanificador: Nombre desconocido, orden inválido o tabla ilegible
    """
    nombre, _, argumento = texto.strip().partition(":")
    if nombre == "uniform" and not argumento:
        return uniform_scheduler()
    if nombre == "priority" and argumento:
        return priority_scheduler(argumento.split(","))
    if nombre == "table" and argumento:
        ruta = Path(argumento)
        try:
            contenido = ruta.read_text(encoding="utf-8")
        except OSError as e:
            raise ErrorPlanificador(f"no se pudo leer la tabla {ruta}: {e.strerror}") from None
        return table_scheduler(load_table_spec(contenido), name=f"table:{ruta.name}")
    raise ErrorPlanificador(f"planificador desconocido: {texto!r} (use uniform, priority:L,R o table:RUTA)")
