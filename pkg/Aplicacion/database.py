"""
Motor de base de datos de los programas y análisis guardados.

QIF_DATABASE_URL elige la base; si falta se usa POSTGRESQL_ADDON_URI (la
variable del despliegue) y, sin ninguna, un archivo SQLite local FugaBox.db.
"""
import logging
import os
from typing import Annotated

from fastapi import Depends
from sqlalchemy.engine import Engine
from sqlalchemy.exc import ArgumentError
from sqlmodel import Session, SQLModel, create_engine

from Nucleo.errores import ErrorConfiguracion

logger = logging.getLogger(__name__)

URL_POR_DEFECTO = "sqlite:///./FugaBox.db"


def url_base_de_datos() -> str:
    url = os.environ.get("QIF_DATABASE_URL") or os.environ.get("POSTGRESQL_ADDON_URI")
    if not url:
        return URL_POR_DEFECTO
    # Los add-on de PostgreSQL publican el esquema viejo postgres://
    if url.startswith("postgres://"):
        url = url.replace("postgres://", "postgresql://", 1)
    return url


def crear_motor(url: str) -> Engine:
    """
    Motor SQLAlchemy para la URL dada.

    Raises:
        ErrorConfiguracion: Si la URL no es válida o su dialecto no está instalado
    """
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    try:
        motor = create_engine(url, connect_args=connect_args)
    except (ArgumentError, ImportError) as e:
        raise ErrorConfiguracion(f"URL de base de datos inválida: {e}") from None
    backend = motor.url.get_backend_name()
    modo = "DESARROLLO" if backend == "sqlite" else "PRODUCCIÓN"
    logger.info("MODO %s: base de datos %s en %s", modo, backend, motor.url.render_as_string(hide_password=True))
    return motor


engine = crear_motor(url_base_de_datos())


def create_tables():
    SQLModel.metadata.create_all(engine, checkfirst=True)


def get_session():
    with Session(engine) as session:
        yield session


SessionDep = Annotated[Session, Depends(get_session)]
