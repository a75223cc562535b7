"""
Lenguaje analizado: AST, parser y pretty printer.

Programas con una única variable secreta S (solo lectura) y una única
variable pública O, composición secuencial, condicionales, bucles y
composición paralela `||`.

Formato de archivo:

    secret S : 3;                # o bien: secret S in {0, 4, 9};
    public O := 0;
    O := S & 0b011;
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

import lark

from Nucleo.errores import ErrorSintaxis

VARIABLE_SECRETA = "S"
VARIABLE_PUBLICA = "O"


class OpBinario(str, Enum):
    """Operadores aritméticos y de bits sobre enteros no negativos."""
    SUMA = "+"
    RESTA = "-"
    MULT = "*"
    DIV = "/"
    MOD = "mod"
    AND = "&"
    OR = "|"
    XOR = "^"
    SHL = "<<"
    SHR = ">>"


class OpComparacion(str, Enum):
    """Comparaciones; producen 0 o 1."""
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="


# ====================================================================
# EXPRESIONES
# ====================================================================

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: OpBinario
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Cmp:
    op: OpComparacion
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, BinOp, Cmp]


# ====================================================================
# SENTENCIAS
# ====================================================================

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class If:
    guard: Expr
    then: "Stmt"
    else_: "Stmt"


@dataclass(frozen=True)
class While:
    guard: Expr
    body: "Stmt"


@dataclass(frozen=True)
class Par:
    left: "Stmt"
    right: "Stmt"


Stmt = Union[Skip, Assign, Seq, If, While, Par]


@dataclass(frozen=True)
class ProgramDecl:
    """
    Programa completo con sus declaraciones.

    Attributes:
        secret_bits: Ancho en bits del secreto (dominio {0, ..., 2^bits - 1})
        initial_o: Valor inicial de O, conocido por el atacante
        body: Cuerpo del programa
        domain: Dominio explícito del secreto; si existe, reemplaza a secret_bits
    """
    secret_bits: int
    initial_o: int
    body: Stmt
    domain: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.secret_bits < 1:
            raise ErrorSintaxis(f"el secreto debe tener al menos 1 bit, se recibió {self.secret_bits}")
        if self.initial_o < 0:
            raise ErrorSintaxis(f"el valor inicial de O debe ser no negativo, se recibió {self.initial_o}")
        if self.domain is not None and not self.domain:
            raise ErrorSintaxis("el dominio del secreto no puede ser vacío")

    def secret_domain(self) -> Tuple[int, ...]:
        """Valores posibles del secreto, en orden ascendente."""
        if self.domain is not None:
            return tuple(sorted(set(self.domain)))
        return tuple(range(2 ** self.secret_bits))


def reads_secret(e: Expr) -> bool:
    """Indica si la expresión lee la variable secreta."""
    if isinstance(e, Var):
        return e.name == VARIABLE_SECRETA
    if isinstance(e, (BinOp, Cmp)):
        return reads_secret(e.left) or reads_secret(e.right)
    return False


# ====================================================================
# PARSER
# ====================================================================

GRAMMAR = r"""
start: secret_decl public_decl stmt*

secret_decl: "secret" NAME ":" NUMBER ";"                         -> secret_bits
           | "secret" NAME "in" "{" NUMBER ("," NUMBER)* "}" ";"   -> secret_domain
public_decl: "public" NAME ":=" NUMBER ";"

stmt: thread ("||" thread)* ";"
?thread: simple | block
block: "{" stmt* "}"
?simple: "skip"                                        -> skip
       | NAME ":=" expr                                -> assign
       | "if" "(" expr ")" "then" block ["else" block] -> if_
       | "while" "(" expr ")" "do" block               -> while_

?expr: bor
?bor: bxor | bor BAR bxor                   -> binop
?bxor: band | bxor CARET band               -> binop
?band: equality | band AMP equality         -> binop
?equality: rel | equality (EQEQ | EQ | NE) rel          -> cmp
?rel: shift | rel (LE | GE | LT | GT) shift            -> cmp
?shift: sum | shift (LSHIFT | RSHIFT) sum              -> binop
?sum: term | sum (PLUS | MINUS) term                   -> binop
?term: atom | term (STAR | SLASH | PERCENT | MOD) atom -> binop
?atom: NUMBER        -> const
     | NAME          -> var
     | "(" expr ")"

BAR: "|"
CARET: "^"
AMP: "&"
EQEQ: "=="
EQ: "="
NE: "!="
LE: "<="
GE: ">="
LT: "<"
GT: ">"
LSHIFT: "<<"
RSHIFT: ">>"
PLUS: "+"
MINUS: "-"
STAR: "*"
SLASH: "/"
PERCENT: "%"
MOD: "mod"
NUMBER: /0b[01]+|0x[0-9a-fA-F]+|[0-9]+/

%import common.CNAME -> NAME
%import common.WS
%ignore WS
%ignore /#[^\n]*/
"""

_OPERADORES = {
    "|": OpBinario.OR, "^": OpBinario.XOR, "&": OpBinario.AND,
    "<<": OpBinario.SHL, ">>": OpBinario.SHR,
    "+": OpBinario.SUMA, "-": OpBinario.RESTA,
    "*": OpBinario.MULT, "/": OpBinario.DIV, "%": OpBinario.MOD, "mod": OpBinario.MOD,
}

_COMPARACIONES = {
    "=": OpComparacion.EQ, "==": OpComparacion.EQ, "!=": OpComparacion.NE,
    "<": OpComparacion.LT, "<=": OpComparacion.LE,
    ">": OpComparacion.GT, ">=": OpComparacion.GE,
}


def _entero(token: lark.Token) -> int:
    texto = str(token)
    # Los ceros a la izquierda se leen en base 10
    if texto[:2].lower() in ("0b", "0x"):
        return int(texto, 0)
    return int(texto, 10)


def _secuencia(stmts: List[Stmt]) -> Stmt:
    if not stmts:
        return Skip()
    resultado = stmts[-1]
    for stmt in reversed(stmts[:-1]):
        resultado = Seq(stmt, resultado)
    return resultado


class _ConstruirAST(lark.Transformer):
    """Transforma el árbol de lark en el AST del lenguaje."""

    def start(self, args):
        (bits, dominio), inicial, *stmts = args
        return ProgramDecl(secret_bits=bits, initial_o=inicial, body=_secuencia(stmts), domain=dominio)

    def secret_bits(self, args):
        nombre, bits = args
        self._exigir_nombre(nombre, VARIABLE_SECRETA)
        return _entero(bits), None

    def secret_domain(self, args):
        nombre, *valores = args
        self._exigir_nombre(nombre, VARIABLE_SECRETA)
        dominio = tuple(_entero(v) for v in valores)
        bits = max(1, max(dominio).bit_length())
        return bits, dominio

    def public_decl(self, args):
        nombre, valor = args
        self._exigir_nombre(nombre, VARIABLE_PUBLICA)
        return _entero(valor)

    def stmt(self, hilos):
        resultado = hilos[0]
        for hilo in hilos[1:]:
            resultado = Par(resultado, hilo)
        return resultado

    def block(self, stmts):
        return _secuencia(stmts)

    def skip(self, _):
        return Skip()

    def assign(self, args):
        destino, expr = args
        if destino == VARIABLE_SECRETA:
            raise ErrorSintaxis("la variable secreta S es de solo lectura", destino.line, destino.column)
        self._exigir_declarada(destino)
        return Assign(VARIABLE_PUBLICA, expr)

    def if_(self, args):
        guarda, entonces, sino = args
        return If(guarda, entonces, sino if sino is not None else Skip())

    def while_(self, args):
        guarda, cuerpo = args
        return While(guarda, cuerpo)

    def binop(self, args):
        izq, op, der = args
        return BinOp(_OPERADORES[str(op)], izq, der)

    def cmp(self, args):
        izq, op, der = args
        return Cmp(_COMPARACIONES[str(op)], izq, der)

    def const(self, args):
        return Const(_entero(args[0]))

    def var(self, args):
        self._exigir_declarada(args[0])
        return Var(str(args[0]))

    @staticmethod
    def _exigir_declarada(nombre: lark.Token):
        if nombre not in (VARIABLE_SECRETA, VARIABLE_PUBLICA):
            raise ErrorSintaxis(f"variable no declarada: {nombre}", nombre.line, nombre.column)

    @staticmethod
    def _exigir_nombre(nombre: lark.Token, esperado: str):
        if nombre != esperado:
            raise ErrorSintaxis(
                f"se esperaba la variable {esperado}, se recibió {nombre}", nombre.line, nombre.column
            )


_parser = lark.Lark(GRAMMAR, parser="lalr", maybe_placeholders=True)


def parse(source: str) -> ProgramDecl:
    """
    Lee un programa fuente.

    Raises:
        ErrorSintaxis: Error de sintaxis (con línea y columna), variable no
            declarada o asignación a S
    """
    try:
        arbol = _parser.parse(source)
    except lark.UnexpectedCharacters as e:
        raise ErrorSintaxis(f"carácter inesperado {e.char!r}", e.line, e.column) from None
    except lark.UnexpectedEOF as e:
        esperados = ", ".join(sorted(e.expected))
        raise ErrorSintaxis(f"fin de archivo inesperado, se esperaba: {esperados}") from None
    except lark.UnexpectedToken as e:
        esperados = ", ".join(sorted(e.expected))
        if e.token.type == "$END":
            raise ErrorSintaxis(f"fin de archivo inesperado, se esperaba: {esperados}") from None
        raise ErrorSintaxis(f"símbolo inesperado {str(e.token)!r}, se esperaba: {esperados}", e.line, e.column) from None
    try:
        return _ConstruirAST().transform(arbol)
    except lark.exceptions.VisitError as e:
        if isinstance(e.orig_exc, ErrorSintaxis):
            raise e.orig_exc from None
        raise ErrorSintaxis(f"programa mal formado: {e.orig_exc}") from None


# ====================================================================
# PRETTY PRINTER
# ====================================================================

_PRECEDENCIA = {
    OpBinario.OR: 1, OpBinario.XOR: 2, OpBinario.AND: 3,
    OpBinario.SHL: 6, OpBinario.SHR: 6,
    OpBinario.SUMA: 7, OpBinario.RESTA: 7,
    OpBinario.MULT: 8, OpBinario.DIV: 8, OpBinario.MOD: 8,
}
_PRECEDENCIA_CMP = {
    OpComparacion.EQ: 4, OpComparacion.NE: 4,
    OpComparacion.LT: 5, OpComparacion.LE: 5, OpComparacion.GT: 5, OpComparacion.GE: 5,
}
_ATOMICA = 9
_SANGRIA = "    "


def _precedencia(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PRECEDENCIA[e.op]
    if isinstance(e, Cmp):
        return _PRECEDENCIA_CMP[e.op]
    return _ATOMICA


def pretty_expr(e: Expr) -> str:
    """Texto de una expresión con los paréntesis mínimos."""
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    nivel = _precedencia(e)
    izq = pretty_expr(e.left)
    der = pretty_expr(e.right)
    if _precedencia(e.left) < nivel:
        izq = f"({izq})"
    if _precedencia(e.right) <= nivel:
        der = f"({der})"
    return f"{izq} {e.op.value} {der}"


def _bloque(stmt: Stmt, nivel: int) -> str:
    cuerpo = "\n".join(_lineas(stmt, nivel + 1))
    return "{\n" + cuerpo + "\n" + _SANGRIA * nivel + "}"


def _hilo(stmt: Stmt, nivel: int) -> str:
    if isinstance(stmt, Skip):
        return "skip"
    if isinstance(stmt, Assign):
        return f"{stmt.target} := {pretty_expr(stmt.expr)}"
    if isinstance(stmt, If):
        texto = f"if ({pretty_expr(stmt.guard)}) then {_bloque(stmt.then, nivel)}"
        if not isinstance(stmt.else_, Skip):
            texto += f" else {_bloque(stmt.else_, nivel)}"
        return texto
    if isinstance(stmt, While):
        return f"while ({pretty_expr(stmt.guard)}) do {_bloque(stmt.body, nivel)}"
    # Seq y Par anidados como hilo van entre llaves
    return _bloque(stmt, nivel)


def _hilos_paralelos(stmt: Par) -> List[Stmt]:
    if isinstance(stmt.left, Par):
        return _hilos_paralelos(stmt.left) + [stmt.right]
    return [stmt.left, stmt.right]


def _lineas(stmt: Stmt, nivel: int) -> List[str]:
    if isinstance(stmt, Seq):
        return _lineas_sentencia(stmt.first, nivel) + _lineas(stmt.second, nivel)
    return _lineas_sentencia(stmt, nivel)


def _lineas_sentencia(stmt: Stmt, nivel: int) -> List[str]:
    if isinstance(stmt, Par):
        texto = " || ".join(_hilo(h, nivel) for h in _hilos_paralelos(stmt))
    else:
        texto = _hilo(stmt, nivel)
    return [_SANGRIA * nivel + texto + ";"]


def pretty_print(prog: ProgramDecl) -> str:
    """Fuente equivalente al programa; parse(pretty_print(p)) == p."""
    if prog.domain is not None:
        valores = ", ".join(str(v) for v in prog.domain)
        lineas = [f"secret {VARIABLE_SECRETA} in {{{valores}}};"]
    else:
        lineas = [f"secret {VARIABLE_SECRETA} : {prog.secret_bits};"]
    lineas.append(f"public {VARIABLE_PUBLICA} := {prog.initial_o};")
    lineas.extend(_lineas(prog.body, 0))
    return "\n".join(lineas)
