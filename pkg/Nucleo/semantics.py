"""
Semántica de pasos pequeños como transformador de distribuciones.

Un paso de un hilo lleva una configuración a una distribución sobre
configuraciones sucesoras: el soporte de la creencia se parte según el
resultado observable del comando ejecutado y cada parte se condiciona.

Atomicidad:
    - una asignación es un paso;
    - una guarda que lee S es un paso propio (silencioso: O no cambia);
    - una guarda que solo lee O se resuelve sin consumir turno y el paso
      ejecuta el primer comando de la rama elegida. Si la rama empieza con
      `||`, o si es la salida de un bucle, el paso es silencioso.
"""
import operator
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from Nucleo.dist import SecretDist, condition, uniform
from Nucleo.errores import ErrorDistribucion, ErrorEvaluacion, ErrorPlanificador
from Nucleo.lang import (
    VARIABLE_SECRETA, Assign, BinOp, Cmp, Const, Expr, If, OpBinario, OpComparacion,
    Par, ProgramDecl, Seq, Skip, Stmt, Var, While, pretty_expr, reads_secret,
)

PRESUPUESTO_POR_DEFECTO = 10_000

TAG_THEN = "then"
TAG_ELSE = "else"
TAG_BODY = "body"
TAG_EXIT = "exit"


@dataclass(frozen=True)
class Config:
    """
    Estado del PKS.

    Attributes:
        program: Código restante; None representa el programa terminado
        o_value: Valor actual de O
        posterior: Creencia del atacante sobre S en este estado
    """
    program: Optional[Stmt]
    o_value: int
    posterior: SecretDist

    @property
    def terminated(self) -> bool:
        return self.program is None


@dataclass(frozen=True)
class Branch:
    probability: Fraction
    next: Config
    tag: str = ""


@dataclass(frozen=True)
class StepOutcome:
    branches: Tuple[Branch, ...]
    executed_thread: int
    executed_command: str


def _resta(a: int, b: int) -> int:
    return max(0, a - b)


def _division(a: int, b: int) -> int:
    if b == 0:
        raise ErrorEvaluacion("división por cero")
    return a // b


def _modulo(a: int, b: int) -> int:
    if b == 0:
        raise ErrorEvaluacion("módulo por cero")
    return a % b


_BINARIOS: Dict[OpBinario, Callable[[int, int], int]] = {
    OpBinario.SUMA: operator.add,
    OpBinario.RESTA: _resta,
    OpBinario.MULT: operator.mul,
    OpBinario.DIV: _division,
    OpBinario.MOD: _modulo,
    OpBinario.AND: operator.and_,
    OpBinario.OR: operator.or_,
    OpBinario.XOR: operator.xor,
    OpBinario.SHL: operator.lshift,
    OpBinario.SHR: operator.rshift,
}

_COMPARADORES: Dict[OpComparacion, Callable[[int, int], bool]] = {
    OpComparacion.EQ: operator.eq,
    OpComparacion.NE: operator.ne,
    OpComparacion.LT: operator.lt,
    OpComparacion.LE: operator.le,
    OpComparacion.GT: operator.gt,
    OpComparacion.GE: operator.ge,
}


def eval_expr(e: Expr, o: int, s: int) -> int:
    """
    Evalúa una expresión con O = o y S = s.

    La resta se trunca en 0; división y módulo son enteros.

    Raises:
        ErrorEvaluacion: División o módulo por cero
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return s if e.name == VARIABLE_SECRETA else o
    izq = eval_expr(e.left, o, s)
    der = eval_expr(e.right, o, s)
    if isinstance(e, Cmp):
        return int(_COMPARADORES[e.op](izq, der))
    return _BINARIOS[e.op](izq, der)


# ====================================================================
# HILOS
# ====================================================================

def _contar_hilos(stmt: Stmt) -> int:
    if isinstance(stmt, Seq):
        return _contar_hilos(stmt.first)
    if isinstance(stmt, Par):
        return _contar_hilos(stmt.left) + _contar_hilos(stmt.right)
    return 1


def _en_secuencia(primero: Optional[Stmt], segundo: Stmt) -> Stmt:
    return segundo if primero is None else Seq(primero, segundo)


def _en_paralelo(izq: Optional[Stmt], der: Optional[Stmt]) -> Optional[Stmt]:
    if izq is None:
        return der
    if der is None:
        return izq
    return Par(izq, der)


def enabled_threads(c: Config) -> List[int]:
    """Índices de los hilos habilitados, de izquierda a derecha en el árbol de `||`."""
    if c.program is None:
        return []
    return list(range(_contar_hilos(c.program)))


@dataclass(frozen=True)
class _Resultado:
    tag: str
    secretos: FrozenSet[int]
    o_value: int
    resto: Optional[Stmt]


def _particion(expr: Expr, o: int, soporte: Sequence[int]) -> Dict[int, FrozenSet[int]]:
    grupos: Dict[int, set] = {}
    for s in soporte:
        grupos.setdefault(eval_expr(expr, o, s), set()).add(s)
    return {v: frozenset(grupo) for v, grupo in sorted(grupos.items())}


def _continuar(etiqueta: str, tag: str, rama: Stmt, o: int, soporte: Sequence[int]) -> Tuple[str, List[_Resultado]]:
    if _contar_hilos(rama) > 1:
        return f"{etiqueta} → {tag}", [_Resultado(tag, frozenset(soporte), o, rama)]
    sub_etiqueta, resultados = _reducir(rama, 0, o, soporte)
    return f"{etiqueta} → {tag}; {sub_etiqueta}", resultados


def _guarda(guarda: Expr, tag_si: str, resto_si: Stmt, tag_no: str, resto_no: Optional[Stmt],
            o: int, soporte: Sequence[int]) -> List[_Resultado]:
    grupos = _particion(guarda, o, soporte)
    resultados = []
    verdaderos = frozenset().union(*(g for v, g in grupos.items() if v != 0))
    if verdaderos:
        resultados.append(_Resultado(tag_si, verdaderos, o, resto_si))
    if 0 in grupos:
        resultados.append(_Resultado(tag_no, grupos[0], o, resto_no))
    return resultados


def _ejecutar(stmt: Stmt, o: int, soporte: Sequence[int]) -> Tuple[str, List[_Resultado]]:
    if isinstance(stmt, Skip):
        return "skip", [_Resultado("", frozenset(soporte), o, None)]

    if isinstance(stmt, Assign):
        etiqueta = f"{stmt.target} := {pretty_expr(stmt.expr)}"
        grupos = _particion(stmt.expr, o, soporte)
        return etiqueta, [_Resultado("", grupo, v, None) for v, grupo in grupos.items()]

    if isinstance(stmt, If):
        etiqueta = f"if ({pretty_expr(stmt.guard)})"
        if reads_secret(stmt.guard):
            return etiqueta, _guarda(stmt.guard, TAG_THEN, stmt.then, TAG_ELSE, stmt.else_, o, soporte)
        if eval_expr(stmt.guard, o, 0):
            return _continuar(etiqueta, TAG_THEN, stmt.then, o, soporte)
        return _continuar(etiqueta, TAG_ELSE, stmt.else_, o, soporte)

    if isinstance(stmt, While):
        etiqueta = f"while ({pretty_expr(stmt.guard)})"
        vuelta = Seq(stmt.body, stmt)
        if reads_secret(stmt.guard):
            return etiqueta, _guarda(stmt.guard, TAG_BODY, vuelta, TAG_EXIT, None, o, soporte)
        if eval_expr(stmt.guard, o, 0):
            return _continuar(etiqueta, TAG_BODY, vuelta, o, soporte)
        return f"{etiqueta} → {TAG_EXIT}", [_Resultado(TAG_EXIT, frozenset(soporte), o, None)]

    raise TypeError(f"sentencia no atómica: {stmt!r}")


def _reducir(stmt: Stmt, hilo: int, o: int, soporte: Sequence[int]) -> Tuple[str, List[_Resultado]]:
    if isinstance(stmt, Seq):
        etiqueta, resultados = _reducir(stmt.first, hilo, o, soporte)
        return etiqueta, [replace(r, resto=_en_secuencia(r.resto, stmt.second)) for r in resultados]
    if isinstance(stmt, Par):
        n = _contar_hilos(stmt.left)
        if hilo < n:
            etiqueta, resultados = _reducir(stmt.left, hilo, o, soporte)
            return etiqueta, [replace(r, resto=_en_paralelo(r.resto, stmt.right)) for r in resultados]
        etiqueta, resultados = _reducir(stmt.right, hilo - n, o, soporte)
        return etiqueta, [replace(r, resto=_en_paralelo(stmt.left, r.resto)) for r in resultados]
    return _ejecutar(stmt, o, soporte)


def step(c: Config, thread: int) -> StepOutcome:
    """
    Ejecuta un comando atómico del hilo indicado.

    Cada rama corresponde a un resultado observable distinto; su
    probabilidad es la masa posterior de los secretos que lo producen y su
    creencia es la posterior condicionada a esos secretos. Las ramas se
    ordenan por el valor resultante de O.

    Raises:
        ErrorPlanificador: Si el hilo no está habilitado
        ErrorEvaluacion: División o módulo por cero
    """
    if thread not in enabled_threads(c):
        raise ErrorPlanificador(f"el hilo {thread} no está habilitado (habilitados: {enabled_threads(c)})")
    etiqueta, resultados = _reducir(c.program, thread, c.o_value, tuple(c.posterior))
    ramas = []
    for r in resultados:
        posterior, masa = condition(c.posterior, r.secretos.__contains__)
        ramas.append(Branch(masa, Config(r.resto, r.o_value, posterior), r.tag))
    ramas.sort(key=lambda rama: rama.next.o_value)
    return StepOutcome(tuple(ramas), thread, etiqueta)


def split_prologue(prog: ProgramDecl) -> Stmt:
    """
    Cuerpo desde el que arranca el modelo.

    Una asignación inicial `O := e` que no lee S y deja O en su valor
    declarado es la que define el estado inicial: no es una transición.
    """
    cuerpo = prog.body
    if isinstance(cuerpo, Seq) and isinstance(cuerpo.first, Assign) and not reads_secret(cuerpo.first.expr):
        try:
            valor = eval_expr(cuerpo.first.expr, prog.initial_o, 0)
        except ErrorEvaluacion:
            return cuerpo
        if valor == prog.initial_o:
            return cuerpo.second
    return cuerpo


def initial_config(prog: ProgramDecl, prior: Optional[SecretDist] = None) -> Config:
    """
    Estado inicial: cuerpo sin prólogo, O declarado y el prior (uniforme por defecto).

    Raises:
        ErrorDistribucion: Si el prior asigna masa fuera del dominio declarado
    """
    dominio = prog.secret_domain()
    if prior is None:
        prior = uniform(dominio)
    fuera = set(prior) - set(dominio)
    if fuera:
        raise ErrorDistribucion(f"el prior asigna masa a valores fuera del dominio: {sorted(fuera)}")
    return Config(split_prologue(prog), prog.initial_o, prior)
