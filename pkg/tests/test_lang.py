import pytest

from conftest import PROGRAMAS_CORPUS, cargar
from Nucleo.errores import ErrorSintaxis
from Nucleo.lang import (
    Assign, BinOp, Cmp, Const, If, OpBinario, OpComparacion, Par, Seq, Skip, Var, While, parse,
    pretty_expr, pretty_print, reads_secret,
)

CABECERA = "secret S : 3;\npublic O := 0;\n"


def cuerpo(texto: str):
    return parse(CABECERA + texto).body


def expr(texto: str):
    return cuerpo(f"O := {texto};").expr


def test_declaraciones():
    prog = parse("secret S : 4;\npublic O := 2;\nO := S;")
    assert prog.secret_bits == 4
    assert prog.initial_o == 2
    assert prog.secret_domain() == tuple(range(16))
    assert prog.body == Assign("O", Var("S"))


def test_dominio_explicito():
    prog = parse("secret S in {9, 0, 4};\npublic O := 0;\nO := S;")
    assert prog.secret_domain() == (0, 4, 9)


def test_programa_p8():
    prog = cargar("p8")
    si = If(
        Cmp(OpComparacion.EQ, Var("O"), Const(1)),
        Assign("O", BinOp(OpBinario.DIV, Var("S"), Const(4))),
        Assign("O", BinOp(OpBinario.MOD, Var("S"), Const(2))),
    )
    esperado = Seq(
        Assign("O", Const(0)),
        Seq(Par(si, Assign("O", Const(1))), Assign("O", BinOp(OpBinario.MOD, Var("S"), Const(4)))),
    )
    assert prog.secret_bits == 3
    assert prog.body == esperado


def test_paralelo_asocia_a_izquierda():
    assert cuerpo("O := 1 || O := 2 || O := 3;") == Par(
        Par(Assign("O", Const(1)), Assign("O", Const(2))), Assign("O", Const(3))
    )


def test_bloque_como_hilo():
    assert cuerpo("{ O := 1; O := 2; } || skip;") == Par(
        Seq(Assign("O", Const(1)), Assign("O", Const(2))), Skip()
    )


def test_if_sin_else_y_while():
    assert cuerpo("if (S > 3) then { O := 1; };") == If(
        Cmp(OpComparacion.GT, Var("S"), Const(3)), Assign("O", Const(1)), Skip()
    )
    assert cuerpo("while (O < 2) do { O := O + 1; };") == While(
        Cmp(OpComparacion.LT, Var("O"), Const(2)), Assign("O", BinOp(OpBinario.SUMA, Var("O"), Const(1)))
    )


def test_cuerpo_vacio_es_skip():
    assert cuerpo("") == Skip()


@pytest.mark.parametrize("texto, esperado", [
    ("0b011", Const(3)),
    ("0x1F", Const(31)),
    ("010", Const(10)),
    ("007 + 0", BinOp(OpBinario.SUMA, Const(7), Const(0))),
    ("S + 1 * 2", BinOp(OpBinario.SUMA, Var("S"), BinOp(OpBinario.MULT, Const(1), Const(2)))),
    ("S - 1 - 2", BinOp(OpBinario.RESTA, BinOp(OpBinario.RESTA, Var("S"), Const(1)), Const(2))),
    ("S mod 8 = 0", Cmp(OpComparacion.EQ, BinOp(OpBinario.MOD, Var("S"), Const(8)), Const(0))),
    ("S % 2", BinOp(OpBinario.MOD, Var("S"), Const(2))),
    ("S == 5", Cmp(OpComparacion.EQ, Var("S"), Const(5))),
    ("S & 3 | 4", BinOp(OpBinario.OR, BinOp(OpBinario.AND, Var("S"), Const(3)), Const(4))),
    ("S >> 1 << 2", BinOp(OpBinario.SHL, BinOp(OpBinario.SHR, Var("S"), Const(1)), Const(2))),
])
def test_precedencia(texto, esperado):
    assert expr(texto) == esperado


def test_comentarios_ignorados():
    assert cuerpo("# comentario\nO := 1; # otro\n") == Assign("O", Const(1))


@pytest.mark.parametrize("fuente, fragmento", [
    (CABECERA + "O := X;", "variable no declarada: X"),
    (CABECERA + "S := 1;", "solo lectura"),
    ("secret K : 3;\npublic O := 0;\n", "se esperaba la variable S"),
    ("secret S : 3;\npublic P := 0;\n", "se esperaba la variable O"),
    (CABECERA + "O := S $ 1;", "carácter inesperado"),
    (CABECERA + "O := S", "fin de archivo inesperado"),
    ("secret S : 0;\npublic O := 0;\n", "al menos 1 bit"),
])
def test_errores_de_sintaxis(fuente, fragmento):
    with pytest.raises(ErrorSintaxis) as error:
        parse(fuente)
    assert fragmento in str(error.value)


def test_error_con_posicion():
    with pytest.raises(ErrorSintaxis) as error:
        parse(CABECERA + "O := S $ 1;")
    assert error.value.linea == 3
    assert error.value.columna == 8


def test_reads_secret():
    assert reads_secret(expr("O + (S & 1)"))
    assert not reads_secret(expr("O * 2 + 1"))


@pytest.mark.parametrize("texto, impreso", [
    ("S - (1 - 2)", "S - (1 - 2)"),
    ("(S - 1) - 2", "S - 1 - 2"),
    ("(S + 1) * 2", "(S + 1) * 2"),
    ("S % 4", "S mod 4"),
    ("S & 0b011", "S & 3"),
])
def test_pretty_expr_parentesis_minimos(texto, impreso):
    assert pretty_expr(expr(texto)) == impreso


@pytest.mark.parametrize("nombre", PROGRAMAS_CORPUS)
def test_pretty_print_se_vuelve_a_leer(nombre):
    prog = cargar(nombre)
    assert parse(pretty_print(prog)) == prog


def test_pretty_print_formato():
    prog = parse("secret S in {1, 2};\npublic O := 0;\nif (S = 1) then { O := 1; } else { skip; };")
    assert pretty_print(prog) == (
        "secret S in {1, 2};\n"
        "public O := 0;\n"
        "if (S = 1) then {\n"
        "    O := 1;\n"
        "};"
    )


def test_ceros_a_la_izquierda_en_declaraciones():
    prog = parse("secret S : 03;\npublic O := 010;\nO := 08;")
    assert prog.secret_bits == 3
    assert prog.initial_o == 10
    assert prog.body == Assign("O", Const(8))
