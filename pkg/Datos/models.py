from sqlmodel import SQLModel, Field, Relationship
from typing import Dict, List, Optional
from datetime import datetime
from pydantic import field_validator
import re

from Nucleo.errores import ErrorConfiguracion, ErrorSintaxis
from Nucleo.lang import parse
from Nucleo.leakage import LeakageReport, validar_medidas
from Nucleo.sched import TablaPlanificador


# ====================================================================
# PROGRAMA
# ====================================================================

class ProgramaBase(SQLModel):
    """
    Modelo base de Programa con validaciones.

    Attributes:
        nombre: Nombre único del programa (letras, dígitos, '_', '-', '.')
        fuente: Código fuente en el lenguaje de FugaBox
    """
    nombre: str = Field(unique=True, index=True, min_length=1, max_length=80, description="Nombre del programa")
    fuente: str = Field(min_length=1, description="Código fuente del programa")

    @field_validator('nombre')
    @classmethod
    def validar_nombre(cls, v: str) -> str:
        """Valida que el nombre sirva como identificador de archivo."""
        v = v.strip()
        patron = r"^[A-Za-z0-9_\-\.]+$"
        if not re.match(patron, v):
            raise ValueError(f"El nombre solo admite letras, dígitos, '_', '-' y '.'. Valor recibido: '{v}'")
        return v

    @field_validator('fuente')
    @classmethod
    def validar_fuente(cls, v: str) -> str:
        """El programa debe ser sintácticamente válido."""
        try:
            parse(v)
        except ErrorSintaxis as e:
            raise ValueError(f"Programa inválido: {e}") from None
        return v


class Programa(ProgramaBase, table=True):
    """
    Modelo de tabla Programa.

    Relaciones:
    - One-to-Many con Analisis (análisis ejecutados sobre el programa)

    Attributes:
        id: Identificador único
        secret_bits: Bits del secreto declarado
        is_active: Indica si el programa está activo
        fecha_creacion: Fecha de creación del registro
    """
    id: Optional[int] = Field(default=None, primary_key=True)
    secret_bits: int = Field(default=1, ge=1)
    is_active: bool = Field(default=True, description="Indica si el programa está activo")
    fecha_creacion: datetime = Field(default_factory=datetime.now)

    analisis: List["Analisis"] = Relationship(back_populates="programa")


class ProgramaCreate(ProgramaBase):
    pass


# ====================================================================
# ANÁLISIS
# ====================================================================

class Analisis(SQLModel, table=True):
    """
    Modelo de tabla Analisis: resultado persistido de un análisis de fuga.

    Attributes:
        programa_id: Programa analizado
        scheduler: Nombre del planificador usado
        budget: Presupuesto de pasos por traza
        initial_uncertainty: Min-entropía inicial (bits)
        expected_leakage: Fuga esperada del programa (bits)
        num_estados: Estados del PKS
        num_trazas: Trazas terminales
        informe_json: LeakageReport completo serializado
    """
    id: Optional[int] = Field(default=None, primary_key=True)
    programa_id: int = Field(foreign_key="programa.id", index=True)
    scheduler: str = Field(max_length=200)
    budget: int = Field(ge=1)
    initial_uncertainty: float
    expected_leakage: float
    num_estados: int = Field(ge=1)
    num_trazas: int = Field(ge=1)
    informe_json: str
    fecha: datetime = Field(default_factory=datetime.now)

    programa: Optional[Programa] = Relationship(back_populates="analisis")


class AnalisisCreate(SQLModel):
    """
    Esquema para ejecutar un análisis.

    Attributes:
        programa_id: Programa a analizar
        scheduler: "uniform", "priority:L,R" o "table" (con `tabla`)
        tabla: Planificador por tabla, cuando scheduler es "table"
        budget: Presupuesto de pasos; por defecto QIF_BUDGET
        prior: Prior sobre S como {"valor": "num/den"}; por defecto uniforme
        medidas: Medidas de comparación a calcular; por defecto todas
    """
    programa_id: int
    scheduler: str = Field(default="uniform", max_length=200)
    tabla: Optional[TablaPlanificador] = None
    budget: Optional[int] = Field(default=None, ge=1)
    prior: Optional[Dict[str, str]] = None
    medidas: Optional[List[str]] = None

    @field_validator('medidas')
    @classmethod
    def validar_medidas(cls, v: Optional[List[str]]) -> Optional[List[str]]:
        if v is None:
            return None
        try:
            return validar_medidas(v)
        except ErrorConfiguracion as e:
            raise ValueError(str(e)) from None


class AnalisisResumen(SQLModel):
    """
    Esquema resumido de análisis para listados.
    """
    id: int
    programa_id: int
    scheduler: str
    budget: int
    initial_uncertainty: float
    expected_leakage: float
    num_estados: int
    num_trazas: int
    fecha: datetime


class AnalisisDetalle(AnalisisResumen):
    """
    Esquema de respuesta con el reporte completo.
    """
    informe: LeakageReport
