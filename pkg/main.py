from contextlib import asynccontextmanager
from fastapi import FastAPI
from Aplicacion.config import configurar_logging
from Aplicacion.database import create_tables
from Datos import Programa, Analisis
from Reportes import Reporte
from fastapi.middleware.cors import CORSMiddleware


@asynccontextmanager
async def lifespan(app: FastAPI):
    configurar_logging()
    create_tables()
    yield


app = FastAPI(
    title="FugaBox API",
    description="Análisis cuantitativo de fuga de información en programas multihilo bajo distintos planificadores",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(Programa.router)
app.include_router(Analisis.router)
app.include_router(Reporte.router)


@app.get("/", tags=["Root"])
async def root():
    return {
        "message": "Bienvenido a FugaBox API",
        "docs": "/docs",
        "redoc": "/redoc"
    }
