from pathlib import Path
from typing import List, Optional

from fastapi import APIRouter, File, Form, HTTPException, Query, UploadFile, status
from fastapi.responses import PlainTextResponse
from pydantic import ValidationError
from sqlmodel import select

from Aplicacion.config import presupuesto_por_defecto
from Aplicacion.database import SessionDep
from Aplicacion.errores_http import error_http
from Datos.models import Analisis, Programa, ProgramaCreate
from Nucleo.errores import ErrorFuga
from Nucleo.lang import parse, pretty_print
from Nucleo.pks import build_pks, to_dot
from Nucleo.sched import parse_scheduler

router = APIRouter(prefix="/programa", tags=["Programas"])


def obtener_programa_activo(session, programa_id: int) -> Programa:
    programa = session.get(Programa, programa_id)
    if not programa or not programa.is_active:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Programa no encontrado o inactivo"
        )
    return programa


def _guardar(datos: ProgramaCreate, session) -> Programa:
    existente = session.exec(select(Programa).where(Programa.nombre == datos.nombre)).first()
    if existente:
        raise HTTPException(
            status_code=status.HTTP_409_CONFLICT,
            detail=f"Ya existe un programa con el nombre '{datos.nombre}'"
        )
    programa = Programa(
        nombre=datos.nombre,
        fuente=datos.fuente,
        secret_bits=parse(datos.fuente).secret_bits,
    )
    session.add(programa)
    session.commit()
    session.refresh(programa)
    return programa


@router.post("/", response_model=Programa, status_code=status.HTTP_201_CREATED)
async def crear_programa(datos: ProgramaCreate, session: SessionDep):
    return _guardar(datos, session)


@router.post("/archivo", response_model=Programa, status_code=status.HTTP_201_CREATED)
async def subir_programa(session: SessionDep, archivo: UploadFile = File(...), nombre: Optional[str] = Form(None)):
    """Crea un programa a partir de un archivo .qif subido."""
    contenido = await archivo.read()
    try:
        fuente = contenido.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail="El archivo debe estar codificado en UTF-8"
        )
    try:
        datos = ProgramaCreate(nombre=nombre or Path(archivo.filename or "programa").stem, fuente=fuente)
    except ValidationError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=[err["msg"] for err in e.errors()]
        )
    return _guardar(datos, session)


@router.get("/", response_model=List[Programa])
async def listar_programas(session: SessionDep, incluir_inactivos: bool = False):
    consulta = select(Programa)
    if not incluir_inactivos:
        consulta = consulta.where(Programa.is_active == True)
    return session.exec(consulta).all()


@router.get("/{programa_id}", response_model=Programa)
async def obtener_programa(programa_id: int, session: SessionDep):
    programa = session.get(Programa, programa_id)
    if not programa:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Programa no encontrado"
        )
    return programa


@router.get("/{programa_id}/formato", response_class=PlainTextResponse)
async def formatear_programa(programa_id: int, session: SessionDep):
    programa = obtener_programa_activo(session, programa_id)
    return pretty_print(parse(programa.fuente)) + "\n"


@router.get("/{programa_id}/dot", response_class=PlainTextResponse)
async def exportar_dot(programa_id: int, session: SessionDep, scheduler: str = "uniform",
                       budget: Optional[int] = None,
                       max_entradas: Optional[int] = Query(default=None, ge=1)):
    """PKS del programa en formato Graphviz DOT."""
    programa = obtener_programa_activo(session, programa_id)
    if scheduler.startswith("table"):
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail="Los planificadores por tabla se envían en POST /analisis/"
        )
    try:
        pks = build_pks(parse(programa.fuente), parse_scheduler(scheduler), budget or presupuesto_por_defecto())
    except ErrorFuga as e:
        raise error_http(e)
    return to_dot(pks, max_entradas)


@router.delete("/{programa_id}", status_code=status.HTTP_200_OK)
async def eliminar_programa(programa_id: int, session: SessionDep, hard_delete: bool = False):
    programa = session.get(Programa, programa_id)
    if not programa:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Programa no encontrado"
        )

    if hard_delete:
        for analisis in session.exec(select(Analisis).where(Analisis.programa_id == programa_id)).all():
            session.delete(analisis)
        session.delete(programa)
        session.commit()
        return {"message": "Programa eliminado permanentemente", "id": programa_id}

    programa.is_active = False
    session.add(programa)
    session.commit()
    return {"message": "Programa desactivado exitosamente", "id": programa_id}
