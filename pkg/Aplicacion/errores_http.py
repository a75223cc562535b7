from fastapi import HTTPException, status

from Nucleo.errores import (
    ErrorConfiguracion, ErrorDistribucion, ErrorEvaluacion, ErrorFuga, ErrorPlanificador, ErrorSintaxis,
    PresupuestoAgotado,
)


def error_http(e: ErrorFuga) -> HTTPException:
    """
    Traduce un error del núcleo a la respuesta HTTP correspondiente.

    - 400: planificador, prior o configuración inválidos
    - 422: programa inválido, división por cero o presupuesto agotado
    """
    if isinstance(e, (ErrorEvaluacion, PresupuestoAgotado, ErrorSintaxis)):
        codigo = status.HTTP_422_UNPROCESSABLE_ENTITY
    elif isinstance(e, (ErrorPlanificador, ErrorDistribucion, ErrorConfiguracion)):
        codigo = status.HTTP_400_BAD_REQUEST
    else:
        codigo = status.HTTP_500_INTERNAL_SERVER_ERROR
    return HTTPException(status_code=codigo, detail=str(e))
