import logging

import pytest

from Aplicacion.config import configurar_logging, presupuesto_por_defecto
from Aplicacion.database import URL_POR_DEFECTO, crear_motor, url_base_de_datos
from Aplicacion.errores_http import error_http
from Nucleo.errores import (
    ErrorConfiguracion, ErrorDistribucion, ErrorEvaluacion, ErrorPlanificador, ErrorSintaxis, PresupuestoAgotado,
)
from Nucleo.semantics import PRESUPUESTO_POR_DEFECTO


def test_presupuesto_por_defecto(monkeypatch):
    monkeypatch.delenv("QIF_BUDGET", raising=False)
    assert presupuesto_por_defecto() == PRESUPUESTO_POR_DEFECTO == 10_000
    monkeypatch.setenv("QIF_BUDGET", "250")
    assert presupuesto_por_defecto() == 250


@pytest.mark.parametrize("valor", ["mucho", "0", "-3", "1.5"])
def test_presupuesto_invalido(monkeypatch, valor):
    monkeypatch.setenv("QIF_BUDGET", valor)
    with pytest.raises(ErrorConfiguracion):
        presupuesto_por_defecto()


def test_nivel_de_log(monkeypatch):
    monkeypatch.setenv("QIF_LOG_LEVEL", "debug")
    configurar_logging()
    monkeypatch.setenv("QIF_LOG_LEVEL", "RUIDOSO")
    with pytest.raises(ErrorConfiguracion):
        configurar_logging()


def test_url_de_base_de_datos(monkeypatch):
    monkeypatch.delenv("QIF_DATABASE_URL", raising=False)
    monkeypatch.delenv("POSTGRESQL_ADDON_URI", raising=False)
    assert url_base_de_datos() == URL_POR_DEFECTO
    monkeypatch.setenv("POSTGRESQL_ADDON_URI", "postgres://fuga:secreto@db:5432/fugabox")
    assert url_base_de_datos() == "postgresql://fuga:secreto@db:5432/fugabox"
    monkeypatch.setenv("QIF_DATABASE_URL", "sqlite:////tmp/otra.db")
    assert url_base_de_datos() == "sqlite:////tmp/otra.db"


def test_motor_registra_el_backend(caplog):
    with caplog.at_level(logging.INFO, logger="Aplicacion.database"):
        motor = crear_motor("sqlite://")
    assert motor.dialect.name == "sqlite"
    assert "MODO DESARROLLO: base de datos sqlite" in caplog.text


@pytest.mark.parametrize("url", ["no es una url", "inexistente://base"])
def test_url_invalida(url):
    with pytest.raises(ErrorConfiguracion):
        crear_motor(url)


@pytest.mark.parametrize("error, codigo", [
    (ErrorSintaxis("x"), 422),
    (ErrorEvaluacion("división por cero"), 422),
    (PresupuestoAgotado("sin pasos"), 422),
    (ErrorPlanificador("x"), 400),
    (ErrorDistribucion("x"), 400),
    (ErrorConfiguracion("x"), 400),
])
def test_error_http(error, codigo):
    assert error_http(error).status_code == codigo
