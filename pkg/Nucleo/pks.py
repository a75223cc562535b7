"""
Estructura de Kripke probabilística (PKS) de un programa bajo un planificador.

La construcción es hacia adelante y en anchura desde el estado inicial. El
resultado es un árbol: estados iguales alcanzados por historias distintas
son nodos distintos, porque la probabilidad y la creencia de una traza
dependen de su historia.
"""
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from Nucleo.dist import SecretDist, fraction_str, is_uniform, to_json as dist_to_json
from Nucleo.errores import ErrorConfiguracion, ErrorEvaluacion, PresupuestoAgotado
from Nucleo.lang import ProgramDecl, pretty_print
from Nucleo.measures import min_entropy
from Nucleo.sched import Historia, SchedulerPolicy
from Nucleo.semantics import PRESUPUESTO_POR_DEFECTO, Config, enabled_threads, initial_config, step

logger = logging.getLogger(__name__)

PathKey = Tuple[Tuple[int, int, str], ...]


@dataclass(frozen=True)
class Edge:
    source: int
    probability: Fraction
    target: int
    thread: int
    command: str
    tag: str = ""

    @property
    def label(self) -> str:
        return f"[t{self.thread}] {self.command}"


@dataclass(frozen=True)
class Pks:
    """
    PKS ya resuelto por el planificador (totalmente probabilístico).

    Attributes:
        states: Configuraciones; el estado 0 es el inicial
        edges: Transiciones con probabilidad = peso del planificador × masa de la rama
        parent: Índice de la arista entrante de cada estado (None para el inicial)
        scheduler: Nombre del planificador usado
    """
    states: Tuple[Config, ...]
    edges: Tuple[Edge, ...]
    parent: Tuple[Optional[int], ...]
    scheduler: str = ""

    initial = 0

    @property
    def terminal(self) -> Tuple[bool, ...]:
        return tuple(c.terminated for c in self.states)

    def outgoing(self, estado: int) -> List[Edge]:
        return [e for e in self.edges if e.source == estado]

    def path_edges(self, estado: int) -> List[Edge]:
        """Aristas desde el estado inicial hasta `estado`."""
        camino = []
        while self.parent[estado] is not None:
            arista = self.edges[self.parent[estado]]
            camino.append(arista)
            estado = arista.source
        return list(reversed(camino))


@dataclass(frozen=True)
class Trace:
    """
    Camino del estado inicial a un estado terminal.

    Attributes:
        id: Posición en la enumeración (orden de estado terminal)
        states: Índices de estados recorridos
        probability: Producto exacto de las probabilidades de las aristas
        observable_o_sequence: Valores de O en cada estado del camino
        edges: Índices de las aristas recorridas
        step_leakages: Caída de min-entropía en cada transición
    """
    id: int
    states: Tuple[int, ...]
    probability: Fraction
    observable_o_sequence: Tuple[int, ...]
    edges: Tuple[int, ...] = ()
    step_leakages: Tuple[float, ...] = ()

    @property
    def final_state(self) -> int:
        return self.states[-1]


def build_pks(
        prog: ProgramDecl,
        policy: SchedulerPolicy,
        budget: int = PRESUPUESTO_POR_DEFECTO,
        prior: Optional[SecretDist] = None,
) -> Pks:
    """
    Construye el PKS A_δ del programa bajo el planificador.

    En cada estado no terminal se consulta al planificador, se expande cada
    hilo elegido con `step` y la probabilidad de la arista es el peso del
    planificador por la masa de la rama.

    Raises:
        ErrorConfiguracion: Presupuesto menor que 1
        PresupuestoAgotado: Una traza supera `budget` pasos
        ErrorEvaluacion: División o módulo por cero en algún paso
    """
    if budget < 1:
        raise ErrorConfiguracion(f"el presupuesto de pasos debe ser al menos 1, se recibió {budget}")
    inicial = initial_config(prog, prior)
    if not is_uniform(inicial.posterior):
        logger.warning("Prior no uniforme: la medida se reporta pero es experimental")

    estados: List[Config] = [inicial]
    aristas: List[Edge] = []
    padre: List[Optional[int]] = [None]
    historias: List[Historia] = [Historia((), (inicial.o_value,))]
    profundidad: List[int] = [0]

    def prefijo(i: int) -> List[str]:
        etiquetas = []
        while padre[i] is not None:
            arista = aristas[padre[i]]
            etiquetas.append(f"{arista.label} [O={estados[arista.target].o_value}]")
            i = arista.source
        return list(reversed(etiquetas))

    cola = deque([0])
    while cola:
        i = cola.popleft()
        actual = estados[i]
        habilitados = enabled_threads(actual)
        if not habilitados:
            continue
        if profundidad[i] >= budget:
            raise PresupuestoAgotado(f"se superó el presupuesto de {budget} pasos", prefijo(i))
        for peso, hilo in policy.decide(historias[i], habilitados):
            try:
                resultado = step(actual, hilo)
            except ErrorEvaluacion as e:
                raise e.con_prefijo(prefijo(i) + [f"[t{hilo}]"]) from None
            for rama in resultado.branches:
                j = len(estados)
                estados.append(rama.next)
                padre.append(len(aristas))
                aristas.append(Edge(i, peso * rama.probability, j, hilo, resultado.executed_command, rama.tag))
                historias.append(historias[i].extend(hilo, rama.next.o_value))
                profundidad.append(profundidad[i] + 1)
                cola.append(j)
        logger.debug("Estado %d expandido (%d estados en total)", i, len(estados))

    pks = Pks(tuple(estados), tuple(aristas), tuple(padre), policy.name)
    logger.info("PKS construido con %d estados y %d aristas (%s)", len(estados), len(aristas), policy.name)
    return pks


def enumerate_traces(pks: Pks) -> List[Trace]:
    """Todas las trazas del estado inicial a un terminal; sus probabilidades suman 1."""
    trazas = []
    for estado, terminal in enumerate(pks.terminal):
        if not terminal:
            continue
        camino = pks.path_edges(estado)
        indices = (pks.initial,) + tuple(e.target for e in camino)
        probabilidad = Fraction(1)
        for arista in camino:
            probabilidad *= arista.probability
        caidas = tuple(
            min_entropy(pks.states[e.source].posterior) - min_entropy(pks.states[e.target].posterior)
            for e in camino
        )
        trazas.append(Trace(
            id=len(trazas),
            states=indices,
            probability=probabilidad,
            observable_o_sequence=tuple(pks.states[i].o_value for i in indices),
            edges=tuple(pks.parent[i] for i in indices[1:]),
            step_leakages=caidas,
        ))
    return trazas


def path_key(trace: Trace, pks: Pks) -> PathKey:
    """Observación consciente del camino: (hilo, O resultante, rama) por transición."""
    return tuple(
        (pks.edges[a].thread, pks.states[pks.edges[a].target].o_value, pks.edges[a].tag)
        for a in trace.edges
    )


# ====================================================================
# EXPORTACIÓN
# ====================================================================

def _escapar(texto: str) -> str:
    return texto.replace("\\", "\\\\").replace('"', '\\"')


def _posterior_etiqueta(d: SecretDist, max_entradas: Optional[int]) -> str:
    if max_entradas is None or len(d) <= max_entradas:
        return repr(d)
    return f"|soporte|={len(d)}, max={max(d.values())}"


def to_dot(pks: Pks, max_entradas: Optional[int] = None) -> str:
    """
    Texto Graphviz DOT: nodos con índice, O y creencia; aristas con probabilidad y comando.

    Args:
        max_entradas: Si se indica, las creencias con más entradas se resumen
            como soporte y probabilidad máxima; por defecto se escriben completas
    """
    lineas = ["digraph PKS {", "    rankdir=TB;", '    node [shape=circle, fontname="Helvetica"];']
    for i, c in enumerate(pks.states):
        forma = ", shape=doublecircle" if c.terminated else ""
        creencia = _posterior_etiqueta(c.posterior, max_entradas)
        etiqueta = _escapar(f"{i}\nO = {c.o_value}\n{creencia}").replace("\n", "\\n")
        lineas.append(f'    n{i} [label="{etiqueta}"{forma}];')
    for e in pks.edges:
        etiqueta = _escapar(f"{e.probability}\n{e.label}").replace("\n", "\\n")
        lineas.append(f'    n{e.source} -> n{e.target} [label="{etiqueta}"];')
    lineas.append("}")
    return "\n".join(lineas) + "\n"


def to_json(pks: Pks) -> Dict[str, Any]:
    """PKS completo con probabilidades y creencias exactas ("num/den")."""
    return {
        "scheduler": pks.scheduler,
        "initial": pks.initial,
        "states": [
            {
                "id": i,
                "o_value": c.o_value,
                "program": None if c.program is None else _programa_texto(c),
                "posterior": dist_to_json(c.posterior),
                "terminal": c.terminated,
            }
            for i, c in enumerate(pks.states)
        ],
        "edges": [
            {
                "from": e.source,
                "to": e.target,
                "probability": fraction_str(e.probability),
                "thread": e.thread,
                "command": e.command,
                "tag": e.tag,
            }
            for e in pks.edges
        ],
    }


def _programa_texto(c: Config) -> str:
    # Solo el cuerpo: las declaraciones no cambian entre estados
    texto = pretty_print(ProgramDecl(secret_bits=1, initial_o=0, body=c.program))
    return "\n".join(texto.splitlines()[2:])
