"""
Oráculo de fuerza bruta.

Ejecuta el programa concretamente para cada valor del secreto y cada
resolución del planificador, y reconstruye probabilidades y creencias
contando corridas. No usa el transformador de distribuciones: comparte con
el análisis solo el árbol sintáctico.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, List, Literal, Optional, Tuple

from Nucleo.dist import SecretDist, uniform
from Nucleo.errores import ErrorEvaluacion, EventoImposible, PresupuestoAgotado
from Nucleo.lang import (
    VARIABLE_SECRETA, Assign, BinOp, Cmp, Const, Expr, If, Par, ProgramDecl, Seq, Skip, Stmt, Var,
    While, reads_secret,
)
from Nucleo.pks import Pks, enumerate_traces, path_key
from Nucleo.sched import Historia, SchedulerPolicy
from Nucleo.semantics import PRESUPUESTO_POR_DEFECTO

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConcreteRun:
    """
    Una ejecución concreta.

    Attributes:
        secret: Valor del secreto
        scheduler_choices: Hilos elegidos en cada paso
        o_sequence: Valores de O, incluido el inicial
        probability_given_secret: Producto de los pesos del planificador
        path_key: (hilo, O resultante, rama) por paso
    """
    secret: int
    scheduler_choices: Tuple[int, ...]
    o_sequence: Tuple[int, ...]
    probability_given_secret: Fraction
    path_key: Tuple[Tuple[int, int, str], ...] = ()


def _valor(e: Expr, o: int, s: int) -> int:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return s if e.name == VARIABLE_SECRETA else o
    a, b = _valor(e.left, o, s), _valor(e.right, o, s)
    op = e.op.value
    if isinstance(e, Cmp):
        return int({"=": a == b, "!=": a != b, "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op])
    if op in ("/", "mod") and b == 0:
        raise ErrorEvaluacion("división por cero" if op == "/" else "módulo por cero")
    if op == "+":
        return a + b
    if op == "-":
        return a - b if a > b else 0
    if op == "*":
        return a * b
    if op == "/":
        return a // b
    if op == "mod":
        return a % b
    if op == "&":
        return a & b
    if op == "|":
        return a | b
    if op == "^":
        return a ^ b
    if op == "<<":
        return a << b
    return a >> b


def _hilos(c: Stmt) -> int:
    if isinstance(c, Par):
        return _hilos(c.left) + _hilos(c.right)
    if isinstance(c, Seq):
        return _hilos(c.first)
    return 1


# Un paso concreto: (O resultante, rama, código restante o None)
_Paso = Tuple[int, str, Optional[Stmt]]


def _paso(c: Stmt, hilo: int, o: int, s: int) -> _Paso:
    if isinstance(c, Seq):
        nuevo_o, rama, resto = _paso(c.first, hilo, o, s)
        return nuevo_o, rama, c.second if resto is None else Seq(resto, c.second)
    if isinstance(c, Par):
        n = _hilos(c.left)
        if hilo < n:
            nuevo_o, rama, resto = _paso(c.left, hilo, o, s)
            return nuevo_o, rama, c.right if resto is None else Par(resto, c.right)
        nuevo_o, rama, resto = _paso(c.right, hilo - n, o, s)
        return nuevo_o, rama, c.left if resto is None else Par(c.left, resto)
    if isinstance(c, Skip):
        return o, "", None
    if isinstance(c, Assign):
        return _valor(c.expr, o, s), "", None
    if isinstance(c, If):
        cierto = _valor(c.guard, o, s) != 0
        elegida, rama = (c.then, "then") if cierto else (c.else_, "else")
        if reads_secret(c.guard) or _hilos(elegida) > 1:
            return o, rama, elegida
        return _paso(elegida, 0, o, s)
    if isinstance(c, While):
        if _valor(c.guard, o, s) == 0:
            return o, "exit", None
        vuelta = Seq(c.body, c)
        if reads_secret(c.guard) or _hilos(vuelta) > 1:
            return o, "body", vuelta
        return _paso(vuelta, 0, o, s)
    raise TypeError(f"sentencia desconocida: {c!r}")


def _cuerpo_inicial(prog: ProgramDecl) -> Stmt:
    c = prog.body
    if isinstance(c, Seq) and isinstance(c.first, Assign) and not reads_secret(c.first.expr):
        try:
            if _valor(c.first.expr, prog.initial_o, 0) == prog.initial_o:
                return c.second
        except ErrorEvaluacion:
            pass
    return c


def oracle_enumerate(
        prog: ProgramDecl,
        policy: SchedulerPolicy,
        prior: Optional[SecretDist] = None,
        budget: int = PRESUPUESTO_POR_DEFECTO,
) -> List[ConcreteRun]:
    """
    Todas las corridas concretas: cada secreto del soporte por cada
    secuencia de decisiones del planificador con peso positivo.

    Raises:
        PresupuestoAgotado: Si alguna corrida supera `budget` pasos
    """
    prior = uniform(prog.secret_domain()) if prior is None else prior
    inicio = _cuerpo_inicial(prog)
    corridas = []
    for s in prior:
        pendientes = [(inicio, Historia((), (prog.initial_o,)), Fraction(1), ())]
        while pendientes:
            codigo, historia, p, clave = pendientes.pop()
            if codigo is None:
                corridas.append(ConcreteRun(s, historia.threads, historia.o_values, p, clave))
                continue
            if len(historia.threads) >= budget:
                raise PresupuestoAgotado(f"el oráculo superó el presupuesto de {budget} pasos con S = {s}")
            habilitados = list(range(_hilos(codigo)))
            for peso, hilo in reversed(policy.decide(historia, habilitados)):
                nuevo_o, rama, resto = _paso(codigo, hilo, historia.o_values[-1], s)
                pendientes.append((resto, historia.extend(hilo, nuevo_o), p * peso, clave + ((hilo, nuevo_o, rama),)))
    logger.debug("Oráculo: %d corridas concretas", len(corridas))
    return corridas


def oracle_posterior(runs: List[ConcreteRun], prior: SecretDist, key: Hashable,
                     by: Literal["o_sequence", "path"] = "o_sequence") -> SecretDist:
    """
    Creencia sobre S tras observar `key`: proporcional a Σ prior(s)·p(corrida | s).

    Raises:
        EventoImposible: Si ninguna corrida produce la observación
    """
    masas: Dict[int, Fraction] = defaultdict(Fraction)
    for r in runs:
        observada = r.o_sequence if by == "o_sequence" else r.path_key
        if observada == key:
            masas[r.secret] += prior[r.secret] * r.probability_given_secret
    total = sum(masas.values(), Fraction(0))
    if total == 0:
        raise EventoImposible(f"la observación {key!r} no ocurre en ninguna corrida")
    return SecretDist({s: m / total for s, m in masas.items()})


def compare_with_pks(prog: ProgramDecl, policy: SchedulerPolicy, pks: Pks,
                     prior: Optional[SecretDist] = None,
                     budget: int = PRESUPUESTO_POR_DEFECTO) -> List[str]:
    """
    Diferencias entre el PKS y el oráculo, agrupando corridas por clave de camino.

    Returns:
        Textos de discrepancia, el contraejemplo más corto primero; vacío si coinciden.
    """
    prior = uniform(prog.secret_domain()) if prior is None else prior
    corridas = oracle_enumerate(prog, policy, prior, budget)

    esperado: Dict[tuple, Dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    secuencias: Dict[tuple, Tuple[int, ...]] = {}
    for r in corridas:
        esperado[r.path_key][r.secret] += prior[r.secret] * r.probability_given_secret
        secuencias[r.path_key] = r.o_sequence

    obtenido = {}
    for t in enumerate_traces(pks):
        obtenido[path_key(t, pks)] = (t.probability, pks.states[t.final_state].posterior, t.observable_o_sequence)

    diferencias: List[Tuple[tuple, str]] = []
    for clave in set(esperado) | set(obtenido):
        if clave not in obtenido:
            diferencias.append((clave, f"traza {list(clave)} solo aparece en el oráculo"))
            continue
        if clave not in esperado:
            diferencias.append((clave, f"traza {list(clave)} solo aparece en el PKS"))
            continue
        probabilidad, posterior, secuencia = obtenido[clave]
        masa = sum(esperado[clave].values(), Fraction(0))
        if probabilidad != masa:
            diferencias.append((clave, f"traza {list(clave)}: probabilidad {probabilidad} en el PKS, {masa} en el oráculo"))
            continue
        creencia = SecretDist({s: m / masa for s, m in esperado[clave].items()})
        if creencia != posterior:
            diferencias.append((clave, f"traza {list(clave)}: creencia final {posterior!r} en el PKS, {creencia!r} en el oráculo"))
        if secuencia != secuencias[clave]:
            diferencias.append((clave, f"traza {list(clave)}: O = {list(secuencia)} en el PKS, {list(secuencias[clave])} en el oráculo"))

    diferencias.sort(key=lambda d: (len(d[0]), d[0], d[1]))
    if diferencias:
        logger.warning("El oráculo no coincide con el PKS en %d trazas", len(diferencias))
    return [texto for _, texto in diferencias]
