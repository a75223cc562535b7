"""
Configuración por variables de entorno.

- QIF_BUDGET: presupuesto de pasos por traza (por defecto 10000)
- QIF_LOG_LEVEL: nivel de logging (por defecto INFO)
- QIF_DATABASE_URL / POSTGRESQL_ADDON_URI: base de datos (ver Aplicacion.database)
"""
import logging
import os

from Nucleo.errores import ErrorConfiguracion
from Nucleo.semantics import PRESUPUESTO_POR_DEFECTO


def presupuesto_por_defecto() -> int:
    """
    Presupuesto de pasos leído de QIF_BUDGET.

    Raises:
        ErrorConfiguracion: Si el valor no es un entero mayor o igual a 1
    """
    valor = os.environ.get("QIF_BUDGET")
    if valor is None or not valor.strip():
        return PRESUPUESTO_POR_DEFECTO
    try:
        presupuesto = int(valor)
    except ValueError:
        raise ErrorConfiguracion(f"QIF_BUDGET debe ser un entero, se recibió {valor!r}") from None
    if presupuesto < 1:
        raise ErrorConfiguracion(f"QIF_BUDGET debe ser al menos 1, se recibió {presupuesto}")
    return presupuesto


def configurar_logging() -> None:
    nivel = os.environ.get("QIF_LOG_LEVEL", "INFO").upper()
    if not isinstance(logging.getLevelName(nivel), int):
        raise ErrorConfiguracion(f"QIF_LOG_LEVEL desconocido: {nivel!r}")
    logging.basicConfig(
        level=nivel,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
