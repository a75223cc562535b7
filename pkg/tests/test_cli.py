import dataclasses
import json
import re

import pytest
from click.testing import CliRunner

from cli import (
    SALIDA_OK, SALIDA_PLANIFICADOR, SALIDA_SEMANTICA, SALIDA_SINTAXIS, CliConfig, cli, report_schema,
    run_oracle_check,
)
from Nucleo.dist import uniform
from Nucleo.leakage import LeakageReport


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def programa(tmp_path):
    def escribir(fuente: str, nombre: str = "prog.qif") -> str:
        ruta = tmp_path / nombre
        ruta.write_text(fuente, encoding="utf-8")
        return str(ruta)
    return escribir


def cumple_esquema(datos: dict, esquema: dict) -> None:
    assert set(esquema["required"]) <= set(datos)
    assert set(datos) <= set(esquema["properties"])
    fila = esquema["$defs"]["TraceRow"]
    for traza in datos["traces"]:
        assert set(fila["required"]) <= set(traza) <= set(fila["properties"])


def test_analyze_p8(runner, corpus_dir):
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "p8.qif")])
    assert result.exit_code == SALIDA_OK
    assert "program: p8" in result.output
    assert "expected_leakage: 2.500000" in result.output
    assert "trace_obs_min: 2.584963" in result.output
    assert "traces: 12" in result.output


def test_analyze_json(runner, corpus_dir, tmp_path):
    salida = tmp_path / "p8.json"
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "p8.qif"), "--format", "json", "--out", str(salida)])
    assert result.exit_code == SALIDA_OK
    datos = json.loads(salida.read_text(encoding="utf-8"))
    assert datos["expected_leakage"] == pytest.approx(2.5, abs=1e-9)
    assert datos["comparisons"]["trace_obs_min"] == pytest.approx(2.584963, abs=1e-6)
    assert len(datos["traces"]) == 12
    informe = LeakageReport.model_validate_json(salida.read_text(encoding="utf-8"))
    assert informe.traces[0].probability.count("/") == 1
    cumple_esquema(datos, report_schema())


def test_analyze_con_medidas(runner, corpus_dir, tmp_path):
    salida = tmp_path / "ex7.json"
    result = runner.invoke(cli, [
        "analyze", str(corpus_dir / "ex7.qif"), "--scheduler", "priority:L",
        "--measure", "io_min", "--format", "json", "--out", str(salida),
    ])
    assert result.exit_code == SALIDA_OK
    datos = json.loads(salida.read_text(encoding="utf-8"))
    assert datos["scheduler"] == "priority:L"
    assert list(datos["comparisons"]) == ["io_min"]
    assert datos["expected_leakage"] == pytest.approx(2.0, abs=1e-9)


def test_medida_desconocida(runner, corpus_dir):
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "p8.qif"), "--measure", "capacidad"])
    assert result.exit_code != SALIDA_OK


def test_analyze_constante(runner, corpus_dir):
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "const.qif")])
    assert result.exit_code == SALIDA_OK
    assert "expected_leakage: 0.000000" in result.output


def test_analyze_con_tabla(runner, corpus_dir, tabla_ex7):
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "ex7.qif"), "--scheduler", tabla_ex7])
    assert result.exit_code == SALIDA_OK
    assert "scheduler: table:ex7_table.json" in result.output


def test_traces_json(runner, corpus_dir, tmp_path):
    salida = tmp_path / "trazas.json"
    result = runner.invoke(cli, ["traces", str(corpus_dir / "ex6.qif"), "--format", "json", "--out", str(salida)])
    assert result.exit_code == SALIDA_OK
    filas = json.loads(salida.read_text(encoding="utf-8"))
    assert len(filas) == 4
    for fila in filas:
        assert fila["probability"] == "1/4"
        assert fila["leakage"] == pytest.approx(2.0, abs=1e-9)
        assert len(fila["final_posterior"]) == 2


def test_traces_texto(runner, corpus_dir):
    result = runner.invoke(cli, ["traces", str(corpus_dir / "ex7.qif"), "--scheduler", "priority:L"])
    assert result.exit_code == SALIDA_OK
    assert len([l for l in result.output.splitlines() if l.startswith("#")]) == 4


def test_export_dot(runner, corpus_dir, tmp_path):
    salida = tmp_path / "p8.dot"
    result = runner.invoke(cli, ["export-dot", str(corpus_dir / "p8.qif"), "--out", str(salida)])
    assert result.exit_code == SALIDA_OK
    dot = salida.read_text(encoding="utf-8")
    assert len(re.findall(r"^\s+n\d+ \[label=", dot, re.MULTILINE)) == 20


def test_export_dot_trivial(runner, programa):
    result = runner.invoke(cli, ["export-dot", programa("secret S : 2;\npublic O := 0;\nO := 5;")])
    assert result.exit_code == SALIDA_OK
    assert len(re.findall(r"^\s+n\d+ \[label=", result.output, re.MULTILINE)) == 2


def test_export_dot_creencia_resumida(runner, corpus_dir):
    completo = runner.invoke(cli, ["export-dot", str(corpus_dir / "p2_8.qif")])
    assert completo.exit_code == SALIDA_OK
    assert "255 ↦ 1/256" in completo.output
    resumido = runner.invoke(cli, ["export-dot", str(corpus_dir / "p2_8.qif"), "--max-posterior", "8"])
    assert resumido.exit_code == SALIDA_OK
    assert "|soporte|=256, max=1/256" in resumido.output


def test_schema(runner, tmp_path):
    salida = tmp_path / "leakage_report.schema.json"
    result = runner.invoke(cli, ["schema", "--out", str(salida)])
    assert result.exit_code == SALIDA_OK
    esquema = json.loads(salida.read_text(encoding="utf-8"))
    assert esquema == LeakageReport.model_json_schema()
    assert {"program", "scheduler", "expected_leakage"} <= set(esquema["required"])
    assert json.loads(runner.invoke(cli, ["schema"]).stdout) == esquema


def test_planificador_invalido(runner, corpus_dir):
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "p8.qif"), "--scheduler", "aleatorio"])
    assert result.exit_code == SALIDA_PLANIFICADOR
    assert "planificador" in result.output


def test_tabla_con_hilo_ausente(runner, corpus_dir, tabla_ex7):
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "p1_8.qif"), "--scheduler", tabla_ex7])
    assert result.exit_code == SALIDA_PLANIFICADOR


def test_error_de_sintaxis(runner, programa):
    result = runner.invoke(cli, ["analyze", programa("secret S : 2;\npublic O := 0;\nO := $;")])
    assert result.exit_code == SALIDA_SINTAXIS
    assert "sintaxis" in result.output


def test_archivo_no_utf8(runner, tmp_path):
    ruta = tmp_path / "binario.qif"
    ruta.write_bytes(b"\xff")
    result = runner.invoke(cli, ["analyze", str(ruta)])
    assert result.exit_code == SALIDA_SINTAXIS
    assert "UTF-8" in result.output


def test_literal_con_ceros_a_la_izquierda(runner, programa):
    result = runner.invoke(cli, ["analyze", programa("secret S : 2;\npublic O := 0;\nO := 010;")])
    assert result.exit_code == SALIDA_OK
    assert "expected_leakage: 0.000000" in result.output


def test_division_por_cero(runner, programa):
    result = runner.invoke(cli, ["analyze", programa("secret S : 2;\npublic O := 0;\nO := S / O;")])
    assert result.exit_code == SALIDA_SEMANTICA
    assert "división por cero" in result.output


def test_presupuesto_agotado(runner, programa):
    fuente = "secret S : 1;\npublic O := 0;\nwhile (O = 0) do { skip; };"
    result = runner.invoke(cli, ["analyze", programa(fuente), "--budget", "30"])
    assert result.exit_code == SALIDA_SEMANTICA
    assert "presupuesto" in result.output


def test_presupuesto_desde_el_entorno(runner, programa, monkeypatch):
    monkeypatch.setenv("QIF_BUDGET", "5")
    fuente = "secret S : 1;\npublic O := 0;\nwhile (O < 10) do { O := O + 1; };"
    result = runner.invoke(cli, ["analyze", programa(fuente)])
    assert result.exit_code == SALIDA_SEMANTICA


def test_nivel_de_log_invalido(runner, corpus_dir, monkeypatch):
    monkeypatch.setenv("QIF_LOG_LEVEL", "RUIDOSO")
    result = runner.invoke(cli, ["analyze", str(corpus_dir / "p8.qif")])
    assert result.exit_code == SALIDA_SEMANTICA
    assert "QIF_LOG_LEVEL" in result.output


@pytest.mark.parametrize("nombre, scheduler", [
    ("p8", "uniform"), ("ex7", "uniform"), ("ex7", "priority:L"), ("contador", "priority:R,L"),
])
def test_oracle_check(runner, corpus_dir, nombre, scheduler):
    result = runner.invoke(cli, ["oracle-check", str(corpus_dir / f"{nombre}.qif"), "--scheduler", scheduler])
    assert result.exit_code == SALIDA_OK
    assert "oracle-check: OK" in result.output


def test_oracle_check_detecta_pks_corrupto(corpus_dir, pks_p8, capsys):
    estados = list(pks_p8.states)
    estados[12] = dataclasses.replace(estados[12], posterior=uniform([0, 4]))
    corrupto = dataclasses.replace(pks_p8, states=tuple(estados))
    cfg = CliConfig("oracle-check", str(corpus_dir / "p8.qif"))
    assert run_oracle_check(cfg, pks=corrupto) == SALIDA_SEMANTICA
    assert "1 discrepancias" in capsys.readouterr().err


def test_programa_inexistente(runner, tmp_path):
    result = runner.invoke(cli, ["analyze", str(tmp_path / "no_existe.qif")])
    assert result.exit_code != SALIDA_OK


def test_salida_determinista(runner, corpus_dir):
    argumentos = ["analyze", str(corpus_dir / "ex7.qif"), "--format", "json"]
    assert runner.invoke(cli, argumentos).output == runner.invoke(cli, argumentos).output
