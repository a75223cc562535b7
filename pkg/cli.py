"""
Línea de comandos de FugaBox.

    python cli.py analyze corpus/p8.qif --scheduler uniform
    python cli.py traces corpus/ex7.qif --scheduler priority:L,R --format json
    python cli.py export-dot corpus/p8.qif --out p8.dot
    python cli.py oracle-check corpus/ex7.qif --scheduler table:corpus/ex7_table.json
    python cli.py schema --out leakage_report.schema.json

Códigos de salida: 0 éxito, 1 error de sintaxis, 2 error semántico o de
presupuesto (y discrepancia con el oráculo), 3 planificador inválido.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Tuple

import click

from Aplicacion.config import configurar_logging
from Nucleo.dist import fraction_str, to_json as dist_to_json
from Nucleo.errores import (
    ErrorConfiguracion, ErrorDistribucion, ErrorEvaluacion, ErrorPlanificador, ErrorSintaxis,
    PresupuestoAgotado,
)
from Nucleo.lang import ProgramDecl, parse
from Nucleo.leakage import MEDIDAS, LeakageReport, build_report
from Nucleo.measures import min_entropy
from Nucleo.oracle import compare_with_pks
from Nucleo.pks import Pks, build_pks, enumerate_traces, to_dot
from Nucleo.sched import SchedulerPolicy, parse_scheduler
from Nucleo.semantics import PRESUPUESTO_POR_DEFECTO

logger = logging.getLogger(__name__)

SALIDA_OK = 0
SALIDA_SINTAXIS = 1
SALIDA_SEMANTICA = 2
SALIDA_PLANIFICADOR = 3


@dataclass
class CliConfig:
    subcommand: str
    program_path: str
    scheduler: str = "uniform"
    measures: Optional[Tuple[str, ...]] = None
    output_format: str = "text"
    budget: int = PRESUPUESTO_POR_DEFECTO
    out: Optional[str] = None
    max_entradas: Optional[int] = None

    @property
    def program_name(self) -> str:
        return Path(self.program_path).stem


def _cargar(cfg: CliConfig) -> Tuple[ProgramDecl, SchedulerPolicy]:
    try:
        fuente = Path(cfg.program_path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ErrorSintaxis("el archivo debe estar codificado en UTF-8") from None
    prog = parse(fuente)
    logger.info("Programa %s leído", cfg.program_name)
    return prog, parse_scheduler(cfg.scheduler)


def _emitir(cfg: CliConfig, texto: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(texto, encoding="utf-8")
    else:
        click.echo(texto, nl=False)


def _protegido(trabajo: Callable[[], int]) -> int:
    """Traduce los errores del análisis a códigos de salida con diagnóstico en stderr."""
    try:
        return trabajo()
    except ErrorSintaxis as e:
        click.echo(f"error de sintaxis: {e}", err=True)
        return SALIDA_SINTAXIS
    except ErrorPlanificador as e:
        click.echo(f"error de planificador: {e}", err=True)
        return SALIDA_PLANIFICADOR
    except (ErrorEvaluacion, PresupuestoAgotado, ErrorDistribucion, ErrorConfiguracion) as e:
        click.echo(f"error: {e}", err=True)
        return SALIDA_SEMANTICA
    except OSError as e:
        click.echo(f"error: no se pudo acceder a {e.filename}: {e.strerror}", err=True)
        return SALIDA_SEMANTICA


def format_report(reporte: LeakageReport) -> str:
    """Reporte de texto, bits con 6 decimales."""
    lineas = [
        f"program: {reporte.program}",
        f"scheduler: {reporte.scheduler}",
        f"initial_uncertainty: {reporte.initial_uncertainty:.6f}",
        f"expected_leakage: {reporte.expected_leakage:.6f}",
        f"final_uncertainty_mean: {reporte.final_uncertainty_mean:.6f}",
        f"final_uncertainty_variance: {reporte.final_uncertainty_variance:.6f}",
        "comparisons:",
    ]
    lineas += [f"  {nombre}: {valor:.6f}" for nombre, valor in reporte.comparisons.items()]
    lineas.append(f"traces: {len(reporte.traces)}")
    for fila in reporte.traces:
        secuencia = " ".join(str(o) for o in fila.o_sequence)
        lineas.append(
            f"  #{fila.id} p={fila.probability} final={fila.final_uncertainty:.6f} "
            f"leakage={fila.leakage:.6f} O=[{secuencia}]"
        )
    return "\n".join(lineas) + "\n"


def report_schema() -> dict:
    """Esquema JSON (pydantic) que valida la salida JSON de analyze."""
    return LeakageReport.model_json_schema()


def run_analyze(cfg: CliConfig) -> int:
    def trabajo() -> int:
        prog, policy = _cargar(cfg)
        pks = build_pks(prog, policy, cfg.budget)
        reporte = build_report(pks, cfg.program_name, policy.name, cfg.measures)
        if cfg.output_format == "json":
            _emitir(cfg, json.dumps(reporte.model_dump(), indent=2, ensure_ascii=False) + "\n")
        else:
            _emitir(cfg, format_report(reporte))
        return SALIDA_OK

    return _protegido(trabajo)


def run_traces(cfg: CliConfig) -> int:
    def trabajo() -> int:
        prog, policy = _cargar(cfg)
        pks = build_pks(prog, policy, cfg.budget)
        inicial = min_entropy(pks.states[pks.initial].posterior)
        filas, creencias = [], []
        for t in enumerate_traces(pks):
            final = pks.states[t.final_state].posterior
            creencias.append(final)
            filas.append({
                "id": t.id,
                "probability": fraction_str(t.probability),
                "o_sequence": list(t.observable_o_sequence),
                "final_posterior": dist_to_json(final),
                "leakage": inicial - min_entropy(final),
            })
        if cfg.output_format == "json":
            _emitir(cfg, json.dumps(filas, indent=2, ensure_ascii=False) + "\n")
        else:
            lineas = [
                f"#{f['id']} p={f['probability']} O=[{' '.join(str(o) for o in f['o_sequence'])}] "
                f"leakage={f['leakage']:.6f} posterior={d!r}"
                for f, d in zip(filas, creencias)
            ]
            _emitir(cfg, "\n".join(lineas) + "\n")
        return SALIDA_OK

    return _protegido(trabajo)


def run_export_dot(cfg: CliConfig) -> int:
    def trabajo() -> int:
        prog, policy = _cargar(cfg)
        _emitir(cfg, to_dot(build_pks(prog, policy, cfg.budget), cfg.max_entradas))
        return SALIDA_OK

    return _protegido(trabajo)


def run_oracle_check(cfg: CliConfig, pks: Optional[Pks] = None) -> int:
    """Compara el PKS (el dado, o el construido) con el oráculo de fuerza bruta."""
    def trabajo() -> int:
        prog, policy = _cargar(cfg)
        modelo = pks if pks is not None else build_pks(prog, policy, cfg.budget)
        diferencias = compare_with_pks(prog, policy, modelo, budget=cfg.budget)
        if diferencias:
            click.echo(f"oracle-check: {len(diferencias)} discrepancias", err=True)
            for d in diferencias:
                click.echo(f"  {d}", err=True)
            return SALIDA_SEMANTICA
        click.echo(f"oracle-check: OK ({len(enumerate_traces(modelo))} trazas)")
        return SALIDA_OK

    return _protegido(trabajo)


# ====================================================================
# COMANDOS
# ====================================================================

def _opcion_planificador(f):
    return click.option(
        "--scheduler", default="uniform", show_default=True,
        help="uniform, priority:L,R o table:RUTA",
    )(f)


def _opcion_presupuesto(f):
    return click.option(
        "--budget", type=int, envvar="QIF_BUDGET", default=PRESUPUESTO_POR_DEFECTO, show_default=True,
        help="Máximo de pasos por traza",
    )(f)


def _opcion_salida(f):
    return click.option("--out", type=click.Path(dir_okay=False), default=None, help="Archivo de salida")(f)


def _opcion_formato(f):
    return click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text")(f)


@click.group()
@click.pass_context
def cli(ctx):
    """Análisis cuantitativo de fuga de información en programas multihilo."""
    try:
        configurar_logging()
    except ErrorConfiguracion as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(SALIDA_SEMANTICA)


@cli.command()
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@_opcion_planificador
@_opcion_formato
@_opcion_presupuesto
@_opcion_salida
@click.option("--measure", "measures", multiple=True, type=click.Choice(list(MEDIDAS)),
              help="Medida de comparación a incluir (repetible; por defecto todas)")
@click.pass_context
def analyze(ctx, program, scheduler, output_format, budget, out, measures):
    """Fuga esperada del programa y medidas de comparación."""
    cfg = CliConfig("analyze", program, scheduler, tuple(measures) or None, output_format, budget, out)
    ctx.exit(run_analyze(cfg))


@cli.command()
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@_opcion_planificador
@_opcion_formato
@_opcion_presupuesto
@_opcion_salida
@click.pass_context
def traces(ctx, program, scheduler, output_format, budget, out):
    """Lista las trazas con probabilidad, valores de O, creencia final y fuga."""
    ctx.exit(run_traces(CliConfig("traces", program, scheduler, None, output_format, budget, out)))


@cli.command("export-dot")
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@_opcion_planificador
@_opcion_presupuesto
@_opcion_salida
@click.option("--max-posterior", "max_entradas", type=click.IntRange(min=1), default=None,
              help="Resume las creencias con más entradas (por defecto se escriben completas)")
@click.pass_context
def export_dot(ctx, program, scheduler, budget, out, max_entradas):
    """Exporta el PKS en formato Graphviz DOT."""
    cfg = CliConfig("export-dot", program, scheduler, None, "text", budget, out, max_entradas)
    ctx.exit(run_export_dot(cfg))


@cli.command("oracle-check")
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@_opcion_planificador
@_opcion_presupuesto
@click.pass_context
def oracle_check(ctx, program, scheduler, budget):
    """Verifica el PKS contra la ejecución concreta de todos los secretos."""
    ctx.exit(run_oracle_check(CliConfig("oracle-check", program, scheduler, budget=budget)))


@cli.command()
@_opcion_salida
def schema(out):
    """Esquema JSON de los reportes de analyze --format json."""
    texto = json.dumps(report_schema(), indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(texto, encoding="utf-8")
    else:
        click.echo(texto, nl=False)


if __name__ == "__main__":
    cli()
