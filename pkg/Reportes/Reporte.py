import io
import pandas as pd
from fastapi import APIRouter, HTTPException, status
from fastapi.responses import StreamingResponse
from sqlmodel import select
from Aplicacion.database import SessionDep
from Datos.models import Analisis, Programa
from Nucleo.leakage import LeakageReport

router = APIRouter(prefix="/reportes", tags=["Reportes"])


@router.get("/{analisis_id}/trazas_csv")
async def trazas_csv(analisis_id: int, session: SessionDep):
    analisis = session.get(Analisis, analisis_id)
    if not analisis:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Análisis no encontrado"
        )
    informe = LeakageReport.model_validate_json(analisis.informe_json)
    rows = []
    for fila in informe.traces:
        rows.append({
            "analisis_id": analisis.id,
            "programa": informe.program,
            "scheduler": informe.scheduler,
            "traza_id": fila.id,
            "probabilidad": fila.probability,
            "incertidumbre_final": fila.final_uncertainty,
            "fuga": fila.leakage,
            "secuencia_o": " ".join(str(o) for o in fila.o_sequence),
        })
    df = pd.DataFrame(rows)
    stream = io.StringIO()
    df.to_csv(stream, index=False)
    stream.seek(0)
    headers = {"Content-Disposition": f"attachment; filename=trazas_{analisis.id}.csv"}
    return StreamingResponse(iter([stream.getvalue()]), media_type="text/csv", headers=headers)


@router.get("/estadisticas/resumen")
async def resumen_estadisticas(session: SessionDep):
    """Cantidad de análisis y fuga esperada media y máxima por planificador."""
    resultados = session.exec(
        select(Analisis, Programa).where(Analisis.programa_id == Programa.id)
    ).all()
    if not resultados:
        return {"total_analisis": 0, "por_planificador": []}
    df = pd.DataFrame([
        {"scheduler": a.scheduler, "programa": p.nombre, "expected_leakage": a.expected_leakage}
        for a, p in resultados
    ])
    grupos = df.groupby("scheduler").agg(
        analisis=("expected_leakage", "size"),
        programas=("programa", "nunique"),
        fuga_media=("expected_leakage", "mean"),
        fuga_maxima=("expected_leakage", "max"),
    ).reset_index()
    return {
        "total_analisis": int(len(df)),
        "por_planificador": [
            {
                "scheduler": str(r.scheduler),
                "analisis": int(r.analisis),
                "programas": int(r.programas),
                "fuga_media": float(r.fuga_media),
                "fuga_maxima": float(r.fuga_maxima),
            }
            for r in grupos.itertuples(index=False)
        ],
    }
