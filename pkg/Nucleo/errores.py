"""
Excepciones del núcleo de análisis.

Todas derivan de ErrorFuga para que la CLI y la API puedan traducirlas
a códigos de salida o a respuestas HTTP en un solo lugar.
"""
from typing import Optional, Sequence


class ErrorFuga(Exception):
    """Error base de FugaBox."""


class ErrorSintaxis(ErrorFuga):
    """
    Error al leer un programa fuente.

    Attributes:
        linea: Línea (1-based) donde se detectó el error, si se conoce
        columna: Columna (1-based) donde se detectó el error, si se conoce
    """

    def __init__(self, mensaje: str, linea: Optional[int] = None, columna: Optional[int] = None):
        self.mensaje = mensaje
        self.linea = linea
        self.columna = columna
        if linea is not None:
            mensaje = f"línea {linea}, columna {columna}: {mensaje}"
        super().__init__(mensaje)


class ErrorDistribucion(ErrorFuga, ValueError):
    """Distribución de probabilidad inválida."""


class EventoImposible(ErrorDistribucion):
    """Condicionamiento sobre un evento de masa cero."""


class ErrorPlanificador(ErrorFuga):
    """Especificación o decisión de planificador inválida."""


class ErrorConfiguracion(ErrorFuga):
    """Variable de entorno con un valor inválido."""


class _ErrorDeTraza(ErrorFuga):
    """Error atribuido a un prefijo concreto de traza."""

    def __init__(self, mensaje: str, prefijo: Sequence[str] = ()):
        self.mensaje = mensaje
        self.prefijo = tuple(prefijo)
        if self.prefijo:
            mensaje = f"{mensaje} (traza: {' -> '.join(self.prefijo)})"
        super().__init__(mensaje)

    def con_prefijo(self, prefijo: Sequence[str]) -> "_ErrorDeTraza":
        return type(self)(self.mensaje, prefijo)


class ErrorEvaluacion(_ErrorDeTraza):
    """División o módulo por cero durante la evaluación."""


class PresupuestoAgotado(_ErrorDeTraza):
    """Una traza superó el presupuesto de pasos (programa que no termina)."""
