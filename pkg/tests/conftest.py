from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from sqlalchemy.pool import StaticPool
from sqlmodel import Session, SQLModel, create_engine

import Datos.models  # noqa: F401  (registra las tablas)
from Aplicacion.database import get_session
from Nucleo.lang import ProgramDecl, parse
from Nucleo.pks import Pks, build_pks
from Nucleo.sched import parse_scheduler, priority_scheduler, uniform_scheduler

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

PROGRAMAS_CORPUS = ["p1_8", "p2_8", "p3", "p4", "ex5", "ex6", "ex7", "p8", "const", "contador"]
PROGRAMAS_SECUENCIALES = ["p1_8", "p2_8", "p3", "p4", "ex5", "ex6"]
# La tabla de ejemplo da pesos a los hilos 0 y 1 en la raíz
PROGRAMAS_PARALELOS = ["ex7", "p8", "contador"]

# Tabla sin reglas: vale para cualquier programa, también los secuenciales
TABLA_UNIFORME = f"table:{CORPUS / 'uniforme_table.json'}"
PLANIFICADORES = ["uniform", "priority:L", "priority:R", TABLA_UNIFORME]


def cargar(nombre: str) -> ProgramDecl:
    return parse((CORPUS / f"{nombre}.qif").read_text(encoding="utf-8"))


def construir(nombre: str, scheduler: str = "uniform") -> Pks:
    return build_pks(cargar(nombre), parse_scheduler(scheduler))


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def tabla_ex7() -> str:
    return f"table:{CORPUS / 'ex7_table.json'}"


@pytest.fixture
def p8() -> ProgramDecl:
    return cargar("p8")


@pytest.fixture
def pks_p8(p8) -> Pks:
    return build_pks(p8, uniform_scheduler())


@pytest.fixture
def pks_ex7_uniforme() -> Pks:
    return build_pks(cargar("ex7"), uniform_scheduler())


@pytest.fixture
def pks_ex7_izquierda() -> Pks:
    return build_pks(cargar("ex7"), priority_scheduler(["L"]))


@pytest.fixture(name="session")
def session_fixture():
    engine = create_engine(
        "sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool
    )
    SQLModel.metadata.create_all(engine)
    with Session(engine) as session:
        yield session


@pytest.fixture(name="client")
def client_fixture(session: Session):
    from main import app

    app.dependency_overrides[get_session] = lambda: session
    client = TestClient(app)
    yield client
    app.dependency_overrides.clear()
