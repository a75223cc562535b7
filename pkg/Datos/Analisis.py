import json
import logging
from typing import List, Optional

from fastapi import APIRouter, HTTPException, status
from sqlmodel import select

from Aplicacion.config import presupuesto_por_defecto
from Aplicacion.database import SessionDep
from Aplicacion.errores_http import error_http
from Datos.Programa import obtener_programa_activo
from Datos.models import Analisis, AnalisisCreate, AnalisisDetalle, AnalisisResumen
from Nucleo.dist import from_json
from Nucleo.errores import ErrorFuga
from Nucleo.lang import parse
from Nucleo.leakage import LeakageReport, build_report
from Nucleo.pks import build_pks, enumerate_traces
from Nucleo.sched import SchedulerPolicy, parse_scheduler, table_scheduler

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analisis", tags=["Análisis"])


def _planificador(datos: AnalisisCreate) -> SchedulerPolicy:
    if datos.scheduler == "table":
        if datos.tabla is None:
            raise HTTPException(
                status_code=status.HTTP_400_BAD_REQUEST,
                detail="El planificador 'table' requiere el campo 'tabla'"
            )
        return table_scheduler(datos.tabla)
    if datos.scheduler.startswith("table:"):
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail="Use scheduler='table' con la tabla en el campo 'tabla'"
        )
    return parse_scheduler(datos.scheduler)


def _detalle(analisis: Analisis) -> AnalisisDetalle:
    return AnalisisDetalle(
        **AnalisisResumen.model_validate(analisis, from_attributes=True).model_dump(),
        informe=LeakageReport.model_validate_json(analisis.informe_json),
    )


@router.post("/", response_model=AnalisisDetalle, status_code=status.HTTP_201_CREATED)
async def crear_analisis(datos: AnalisisCreate, session: SessionDep):
    """
    Construye el PKS del programa bajo el planificador, calcula el reporte de
    fuga y lo persiste.
    """
    programa = obtener_programa_activo(session, datos.programa_id)
    try:
        policy = _planificador(datos)
        prior = from_json(datos.prior) if datos.prior is not None else None
        budget = datos.budget or presupuesto_por_defecto()
        pks = build_pks(parse(programa.fuente), policy, budget, prior)
        informe = build_report(pks, programa.nombre, policy.name, datos.medidas)
    except ErrorFuga as e:
        raise error_http(e)

    analisis = Analisis(
        programa_id=programa.id,
        scheduler=policy.name,
        budget=budget,
        initial_uncertainty=informe.initial_uncertainty,
        expected_leakage=informe.expected_leakage,
        num_estados=len(pks.states),
        num_trazas=len(enumerate_traces(pks)),
        informe_json=json.dumps(informe.model_dump()),
    )
    session.add(analisis)
    session.commit()
    session.refresh(analisis)
    logger.info("Análisis %d guardado para el programa %s", analisis.id, programa.nombre)
    return _detalle(analisis)


@router.get("/", response_model=List[AnalisisResumen])
async def listar_analisis(session: SessionDep, programa_id: Optional[int] = None):
    consulta = select(Analisis)
    if programa_id is not None:
        consulta = consulta.where(Analisis.programa_id == programa_id)
    return session.exec(consulta.order_by(Analisis.id)).all()


@router.get("/{analisis_id}", response_model=AnalisisDetalle)
async def obtener_analisis(analisis_id: int, session: SessionDep):
    analisis = session.get(Analisis, analisis_id)
    if not analisis:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Análisis no encontrado"
        )
    return _detalle(analisis)


@router.delete("/{analisis_id}", status_code=status.HTTP_200_OK)
async def eliminar_analisis(analisis_id: int, session: SessionDep):
    analisis = session.get(Analisis, analisis_id)
    if not analisis:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Análisis no encontrado"
        )
    session.delete(analisis)
    session.commit()
    return {"message": "Análisis eliminado exitosamente", "id": analisis_id}
