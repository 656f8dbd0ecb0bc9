"""Path and QPath diagrams: generators, matrix semantics and normal forms.

Generators (wire counts in parentheses)::

    copy (1->2)  discard (1->0)  merge (2->1)  unit (0->1)
    swap (2->2)  scalar (1->1, weight)
    create (0->1, n photons)  annihilate (1->0, n photons)

``create(0)`` and ``annihilate(0)`` are the white ``unit`` and ``discard``.
The classical semantics :func:`eval_matrix` orients matrices as
``cod x dom`` (column-vector convention). Black and white nodes agree
classically, so it treats ``create``/``annihilate`` as ``unit``/``discard``.

Normalisation rewrites a diagram to a weighted bipartite graph from its
sources (input wires, then photon creations) to its sinks (output wires,
then photon annihilations):

0. swaps are absorbed into the wiring;
1. units and discards are pushed through copy, merge and scalar nodes
   with the (co)unit and (co)copy laws until each one touches a source or
   sink;
2. the bialgebra, scalar-copy and multiplicative laws move every copy
   before every merge, leaving at most one scalar on each path between
   them;
3. parallel edges between the same source and sink are summed (additive
   law) and the canonical diagram of the resulting matrix is rebuilt.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from lopath.circuits import BS_MATRIX, Circuit
from lopath.diagram import BOUNDARY, Builder, Diagram, Node, Port, from_graph
from lopath.errors import DomainError

COPY = Node("copy", 1, 2)
MERGE = Node("merge", 2, 1)
UNIT = Node("unit", 0, 1)
DISCARD = Node("discard", 1, 0)
SWAP = Node("swap", 2, 2)

PATH_KINDS = {"copy", "merge", "unit", "discard", "swap", "scalar", "create", "annihilate"}


def scalar_node(w: complex) -> Node:
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError("scalar weights must be finite")
    return Node("scalar", 1, 1, w)


def create_node(n: int) -> Node:
    if n < 0:
        raise DomainError("photon number must be non-negative")
    return UNIT if n == 0 else Node("create", 0, 1, int(n))


def annihilate_node(n: int) -> Node:
    if n < 0:
        raise DomainError("photon number must be non-negative")
    return DISCARD if n == 0 else Node("annihilate", 1, 0, int(n))


def copy() -> Diagram:
    return Diagram.box(COPY)


def merge() -> Diagram:
    return Diagram.box(MERGE)


def unit() -> Diagram:
    return Diagram.box(UNIT)


def discard() -> Diagram:
    return Diagram.box(DISCARD)


def swap() -> Diagram:
    return Diagram.box(SWAP)


def scalar(w: complex) -> Diagram:
    return Diagram.box(scalar_node(w))


def create(n: int = 1) -> Diagram:
    return Diagram.box(create_node(n))


def annihilate(n: int = 1) -> Diagram:
    return Diagram.box(annihilate_node(n))


def empty() -> Diagram:
    return Diagram.id(0)


def tensor_all(diagrams: Sequence[Diagram], dom_if_empty: int = 0) -> Diagram:
    out = Diagram.id(dom_if_empty) if not diagrams else diagrams[0]
    for d in diagrams[1:]:
        out = out @ d
    return out


def compose_seq(d1: Diagram, d2: Diagram) -> Diagram:
    return d1 >> d2


def compose_par(d1: Diagram, d2: Diagram) -> Diagram:
    return d1 @ d2


# -- classical semantics ----------------------------------------------------


def eval_matrix(d: Diagram) -> np.ndarray:
    """The ``cod x dom`` matrix of ``d`` (sum over weighted paths)."""
    val: dict[Port, np.ndarray] = {}
    eye = np.eye(d.dom, dtype=complex)
    for i in range(d.dom):
        val[(BOUNDARY, i)] = eye[i]
    zero = np.zeros(d.dom, dtype=complex)
    for k, node in enumerate(d.nodes):
        ins = [val.pop(p) for p in d.inputs_of(k)]
        kind = node.kind
        if kind == "copy":
            outs = [ins[0], ins[0]]
        elif kind == "merge":
            outs = [ins[0] + ins[1]]
        elif kind in ("unit", "create"):
            outs = [zero]
        elif kind in ("discard", "annihilate"):
            outs = []
        elif kind == "swap":
            outs = [ins[1], ins[0]]
        elif kind == "scalar":
            outs = [node.param * ins[0]]
        else:
            raise DomainError(f"{kind!r} is not a Path generator")
        for j, v in enumerate(outs):
            val[(k, j)] = v
    if d.cod == 0:
        return np.zeros((0, d.dom), dtype=complex)
    return np.array([val[p] for p in d.outputs], dtype=complex).reshape(d.cod, d.dom)


# -- translation from optics ----------------------------------------------


def bs_diagram(U2=BS_MATRIX) -> Diagram:
    """Two copies, four weighted crossings and two merges realising a 2x2 matrix."""
    b = Builder(2)
    a0, a1 = b.add(COPY, b.inputs[0])
    c0, c1 = b.add(COPY, b.inputs[1])
    (w00,) = b.add(scalar_node(U2[0, 0]), a0)
    (w10,) = b.add(scalar_node(U2[1, 0]), a1)
    (w01,) = b.add(scalar_node(U2[0, 1]), c0)
    (w11,) = b.add(scalar_node(U2[1, 1]), c1)
    (o0,) = b.add(MERGE, w00, w01)
    (o1,) = b.add(MERGE, w10, w11)
    return b.build([o0, o1])


def lo_to_path(c: Circuit) -> Diagram:
    """The Path diagram of an LO circuit; ``eval_matrix`` recovers its unitary."""
    b = Builder(c.width)
    ports = list(b.inputs)
    bs = bs_diagram()
    for g in c.gates:
        p = g.position
        if g.kind == "bs":
            ports[p : p + 2] = b.embed(bs, ports[p : p + 2])
        else:
            (ports[p],) = b.add(scalar_node(cmath.exp(1j * g.angle)), ports[p])
    return b.build(ports)


# -- normal forms -----------------------------------------------------------


@dataclass
class WeightedBipartiteGraph:
    """Complete bipartite graph with complex edge weights.

    ``weights[i, j]`` is the weight of the edge from left node ``i`` (a
    source) to right node ``j`` (a sink); missing edges have weight 0.
    """

    weights: np.ndarray

    @property
    def left_size(self) -> int:
        return self.weights.shape[0]

    @property
    def right_size(self) -> int:
        return self.weights.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        """Weights oriented ``sinks x sources``, comparable with :func:`eval_matrix`."""
        return self.weights.T

    def edges(self):
        for i in range(self.left_size):
            for j in range(self.right_size):
                yield i, j, complex(self.weights[i, j])

    def __eq__(self, other):
        return isinstance(other, WeightedBipartiteGraph) and np.array_equal(self.weights, other.weights)


class _Work:
    """Mutable copy of a diagram used during rewriting."""

    def __init__(self, d: Diagram):
        self.dom, self.cod = d.dom, d.cod
        self.nodes: dict[int, Node] = dict(enumerate(d.nodes))
        self.src: dict[Port, Port] = dict(d.wires)
        self.dst: dict[Port, Port] = {s: t for t, s in d.wires.items()}
        self.next_id = len(d.nodes)

    def to_diagram(self) -> Diagram:
        return from_graph(Diagram, self.dom, self.cod, self.nodes, self.src)

    def kind_at(self, port: Port) -> str:
        return "boundary" if port[0] == BOUNDARY else self.nodes[port[0]].kind

    def splice(self, ids: Sequence[int], ext_in: Sequence[Port], ext_out: Sequence[Port], repl: Diagram):
        """Replace nodes ``ids`` by ``repl``, fed by ``ext_in`` and feeding ``ext_out``."""
        for k in ids:
            node = self.nodes.pop(k)
            for p in range(node.n_in):
                s = self.src.pop((k, p), None)
                if s is not None and self.dst.get(s) == (k, p):
                    del self.dst[s]
            for p in range(node.n_out):
                t = self.dst.pop((k, p), None)
                if t is not None and self.src.get(t) == (k, p):
                    del self.src[t]
        new_ids = []
        for node in repl.nodes:
            new_ids.append(self.next_id)
            self.nodes[self.next_id] = node
            self.next_id += 1

        def mapped_src(port: Port) -> Port:
            n, p = port
            return ext_in[p] if n == BOUNDARY else (new_ids[n], p)

        for (n, p), s in repl.wires.items():
            target = ext_out[p] if n == BOUNDARY else (new_ids[n], p)
            source = mapped_src(s)
            self.src[target] = source
            self.dst[source] = target


def _fan(b: Builder, port: Port, n: int, node: Node) -> list[Port]:
    """Chain of copies giving ``n`` leaves (a discard when ``n == 0``)."""
    if n == 0:
        b.add(DISCARD, port)
        return []
    leaves = []
    for _ in range(n - 1):
        left, port = b.add(node, port)
        leaves.append(left)
    leaves.append(port)
    return leaves


def _cofan(b: Builder, ports: list[Port]) -> Port:
    """Chain of merges joining ``ports`` (a unit when there are none)."""
    if not ports:
        (out,) = b.add(UNIT)
        return out
    out = ports[0]
    for p in ports[1:]:
        (out,) = b.add(MERGE, out, p)
    return out


def canonical_diagram(weights, dom: int | None = None, cod: int | None = None) -> Diagram:
    """Canonical normal-form diagram for a ``sources x sinks`` weight matrix.

    The first ``dom`` sources are input wires, the rest are single-photon
    creations; the first ``cod`` sinks are output wires, the rest are
    single-photon annihilations.
    """
    W = np.asarray(weights, dtype=complex)
    n_src, n_snk = W.shape
    dom = n_src if dom is None else dom
    cod = n_snk if cod is None else cod
    b = Builder(dom)
    roots = list(b.inputs) + [b.add(create_node(1))[0] for _ in range(n_src - dom)]
    into: list[list[Port]] = [[] for _ in range(n_snk)]
    for i, root in enumerate(roots):
        for j, leaf in enumerate(_fan(b, root, n_snk, COPY)):
            (w,) = b.add(scalar_node(W[i, j]), leaf)
            into[j].append(w)
    outs = [_cofan(b, ports) for ports in into]
    for p in outs[cod:]:
        b.add(annihilate_node(1), p)
    return b.build(outs[:cod])


def _rule_swap(w: _Work, k: int) -> bool:
    w.splice([k], [w.src[(k, 0)], w.src[(k, 1)]], [w.dst[(k, 0)], w.dst[(k, 1)]], Diagram.permutation([1, 0]))
    return True


def _rule_unit(w: _Work, k: int) -> bool:
    t = w.dst[(k, 0)]
    n, port = t
    kind = w.kind_at(t)
    if kind == "copy":
        w.splice([k, n], [], [w.dst[(n, 0)], w.dst[(n, 1)]], unit() @ unit())
    elif kind == "merge":
        w.splice([k, n], [w.src[(n, 1 - port)]], [w.dst[(n, 0)]], Diagram.id(1))
    elif kind == "scalar":
        w.splice([k, n], [], [w.dst[(n, 0)]], unit())
    elif kind == "discard":
        w.splice([k, n], [], [], empty())
    else:
        return False
    return True


def _rule_discard(w: _Work, k: int) -> bool:
    s = w.src[(k, 0)]
    n, port = s
    kind = w.kind_at(s)
    if kind == "copy":
        w.splice([k, n], [w.src[(n, 0)]], [w.dst[(n, 1 - port)]], Diagram.id(1))
    elif kind == "merge":
        w.splice([k, n], [w.src[(n, 0)], w.src[(n, 1)]], [], discard() @ discard())
    elif kind == "scalar":
        w.splice([k, n], [w.src[(n, 0)]], [], discard())
    elif kind == "unit":
        w.splice([k, n], [], [], empty())
    else:
        return False
    return True


def _rule_scalar(w: _Work, k: int) -> bool:
    t = w.dst[(k, 0)]
    n = t[0]
    kind = w.kind_at(t)
    r = w.nodes[k].param
    if kind == "scalar":
        w.splice([k, n], [w.src[(k, 0)]], [w.dst[(n, 0)]], scalar(r * w.nodes[n].param))
    elif kind == "copy":
        w.splice([k, n], [w.src[(k, 0)]], [w.dst[(n, 0)], w.dst[(n, 1)]], copy() >> scalar(r) @ scalar(r))
    else:
        return False
    return True


_BIALGEBRA = (copy() @ copy()) >> Diagram.permutation([0, 2, 1, 3]) >> (merge() @ merge())


def _rule_merge(w: _Work, k: int) -> bool:
    t = w.dst[(k, 0)]
    n = t[0]
    kind = w.kind_at(t)
    ext_in = [w.src[(k, 0)], w.src[(k, 1)]]
    if kind == "scalar":
        r = w.nodes[n].param
        w.splice([k, n], ext_in, [w.dst[(n, 0)]], scalar(r) @ scalar(r) >> merge())
    elif kind == "copy":
        w.splice([k, n], ext_in, [w.dst[(n, 0)], w.dst[(n, 1)]], _BIALGEBRA)
    else:
        return False
    return True


_PHASES: list[dict[str, Callable[[_Work, int], bool]]] = [
    {"swap": _rule_swap},
    {"unit": _rule_unit, "discard": _rule_discard},
    {"scalar": _rule_scalar, "merge": _rule_merge},
]

StepCallback = Callable[[str, Diagram], None]


def _run_phase(w: _Work, rules, phase: str, on_step: StepCallback | None):
    changed = True
    while changed:
        changed = False
        for k in sorted(w.nodes):
            if k not in w.nodes:
                continue
            rule = rules.get(w.nodes[k].kind)
            if rule is not None and rule(w, k):
                changed = True
                if on_step is not None:
                    on_step(phase, w.to_diagram())


def _extract(w: _Work) -> np.ndarray:
    """Sum weighted paths from every source to every sink of a layered diagram."""
    sources: list[Port] = [(BOUNDARY, i) for i in range(w.dom)]
    sinks: dict[Port, int] = {(BOUNDARY, j): j for j in range(w.cod)}
    creates = sorted(k for k, node in w.nodes.items() if node.kind == "create")
    annihilates = sorted(k for k, node in w.nodes.items() if node.kind == "annihilate")
    for k in creates:
        if w.nodes[k].param != 1:
            raise DomainError("multi-photon creations must be expanded before extraction")
        sources.append((k, 0))
    for k in annihilates:
        if w.nodes[k].param != 1:
            raise DomainError("multi-photon annihilations must be expanded before extraction")
        sinks[(k, 0)] = len(sinks)
    W = np.zeros((len(sources), len(sinks)), dtype=complex)
    for i, s in enumerate(sources):
        stack = [(s, 1 + 0j)]
        while stack:
            port, weight = stack.pop()
            t = w.dst[port]
            if t in sinks:
                W[i, sinks[t]] += weight
                continue
            node = w.nodes[t[0]]
            if node.kind == "copy":
                stack.append(((t[0], 1), weight))
                stack.append(((t[0], 0), weight))
            elif node.kind == "scalar":
                stack.append(((t[0], 0), weight * node.param))
            elif node.kind == "merge":
                stack.append(((t[0], 0), weight))
            elif node.kind == "discard":
                continue
            else:
                raise DomainError(f"unexpected {node.kind} node after rewriting")
    return W


def expand_photons(d: Diagram) -> tuple[Diagram, complex]:
    """Normalisation law: split every n-photon endpoint into n single photons.

    ``create(n)`` becomes ``n`` single-photon creations joined by merges,
    scaled by ``1 / sqrt(n!)``; annihilations dually. Returns the expanded
    diagram and the accumulated scalar.
    """
    # product of n! over expanded endpoints; one square root at the end keeps
    # factors such as 1/2 exact
    denom = 1

    def image(node: Node) -> Diagram:
        nonlocal denom
        n = node.param
        if node.kind == "create" and n > 1:
            denom *= math.factorial(n)
            b = Builder(0)
            return b.build([_cofan(b, [b.add(create_node(1))[0] for _ in range(n)])])
        if node.kind == "annihilate" and n > 1:
            denom *= math.factorial(n)
            b = Builder(1)
            for leaf in _fan(b, b.inputs[0], n, COPY):
                b.add(annihilate_node(1), leaf)
            return b.build([])
        return Diagram.box(node)

    expanded = d.map_nodes(image)
    return expanded, complex(1 / math.sqrt(denom))


@dataclass
class NormalForm:
    """Result of rewriting: bipartite graph, scalar and the normal-form diagram.

    The semantics of the original diagram equals ``factor`` times the
    semantics of ``diagram``.
    """

    graph: WeightedBipartiteGraph
    factor: complex
    diagram: Diagram
    dom: int
    cod: int

    @property
    def n_creations(self) -> int:
        return self.graph.left_size - self.dom

    @property
    def n_annihilations(self) -> int:
        return self.graph.right_size - self.cod


def rewrite(d: Diagram, on_step: StepCallback | None = None) -> NormalForm:
    """Run the full normalisation procedure on a Path or QPath diagram.

    ``on_step(phase, diagram)`` is called after every rewrite with the
    current diagram, whose semantics times the returned ``factor`` equals
    that of ``d``.
    """
    for node in d.nodes:
        if node.kind not in PATH_KINDS:
            raise DomainError(f"{node.kind!r} is not a QPath generator")
    expanded, factor = expand_photons(d)
    if on_step is not None and expanded != d:
        on_step("normalisation", expanded)
    w = _Work(expanded)
    for phase, rules in zip(("swap", "unit", "bialgebra"), _PHASES):
        _run_phase(w, rules, phase, on_step)
    W = _extract(w)
    nf = canonical_diagram(W, d.dom, d.cod)
    if on_step is not None:
        on_step("additive", nf)
    return NormalForm(WeightedBipartiteGraph(W), factor, nf, d.dom, d.cod)


def normal_form(d: Diagram) -> WeightedBipartiteGraph:
    """Weighted bipartite graph of a Path diagram, inputs on the left."""
    return rewrite(d).graph


# -- axioms -----------------------------------------------------------------


def path_axioms(r: complex = 2 - 1j, s: complex = 0.5 + 3j) -> list[tuple[str, Diagram, Diagram]]:
    """Equations of the Path calculus instantiated at scalars ``r`` and ``s``."""
    I = Diagram.id(1)
    sw = swap()
    return [
        ("copy associativity", copy() >> copy() @ I, copy() >> I @ copy()),
        ("merge associativity", merge() @ I >> merge(), I @ merge() >> merge()),
        ("copy commutativity", copy() >> sw, copy()),
        ("merge commutativity", sw >> merge(), merge()),
        ("counit", copy() >> discard() @ I, I),
        ("unit", unit() @ I >> merge(), I),
        ("copy unit", unit() >> copy(), unit() @ unit()),
        ("merge discard", merge() >> discard(), discard() @ discard()),
        ("unit discard", unit() >> discard(), empty()),
        ("bialgebra", merge() >> copy(), _BIALGEBRA),
        ("swap involution", sw >> sw, Diagram.id(2)),
        ("swap naturality", scalar(r) @ I >> sw, sw >> I @ scalar(r)),
        ("multiplicative", scalar(r) >> scalar(s), scalar(r * s)),
        ("additive", copy() >> scalar(r) @ scalar(s) >> merge(), scalar(r + s)),
        ("scalar copy", scalar(r) >> copy(), copy() >> scalar(r) @ scalar(r)),
        ("scalar merge", merge() >> scalar(r), scalar(r) @ scalar(r) >> merge()),
        ("scalar unit", unit() >> scalar(r), unit()),
        ("scalar discard", scalar(r) >> discard(), discard()),
        ("one", scalar(1), I),
        ("zero", scalar(0), discard() >> unit()),
    ]


# -- serialisation ------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def format_complex(z: complex) -> str:
    """Render ``z`` as ``a+bi``."""
    z = complex(z)
    im = _fmt(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{_fmt(z.real)}{sign}{im}i"


def _node_label(node: Node) -> str:
    if node.kind == "scalar":
        return format_complex(node.param)
    if node.kind in ("create", "annihilate"):
        return f"{node.kind} {node.param}"
    if node.kind in ("Z", "X"):
        return f"{node.kind}({_fmt(node.param)})"
    return node.kind


def diagram_to_dot(d: Diagram, name: str = "diagram") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i in range(d.dom):
        lines.append(f'  in{i} [shape=point, xlabel="in {i}"];')
    for k, node in enumerate(d.nodes):
        lines.append(f'  n{k} [label="{_node_label(node)}"];')
    for j in range(d.cod):
        lines.append(f'  out{j} [shape=point, xlabel="out {j}"];')
    for t in sorted(d.wires):
        s = d.wires[t]
        a = f"in{s[1]}" if s[0] == BOUNDARY else f"n{s[0]}"
        b = f"out{t[1]}" if t[0] == BOUNDARY else f"n{t[0]}"
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(g: WeightedBipartiteGraph, name: str = "normal_form", left: str = "L", right: str = "R") -> str:
    lines = [f"graph {name} {{", "  rankdir=LR;"]
    for i in range(g.left_size):
        lines.append(f"  {left}{i} [shape=circle];")
    for j in range(g.right_size):
        lines.append(f"  {right}{j} [shape=circle];")
    for i, j, w in g.edges():
        lines.append(f'  {left}{i} -- {right}{j} [label="{format_complex(w)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def node_to_json(node: Node) -> dict:
    out: dict = {"kind": node.kind}
    if node.kind == "scalar":
        out["weight"] = {"re": node.param.real, "im": node.param.imag}
    elif node.kind in ("create", "annihilate"):
        out["photons"] = node.param
    return out


def node_from_json(data: dict) -> Node:
    kind = data["kind"]
    if kind == "scalar":
        w = data["weight"]
        return scalar_node(complex(w["re"], w["im"]) if isinstance(w, dict) else complex(w))
    if kind == "create":
        return create_node(int(data.get("photons", 1)))
    if kind == "annihilate":
        return annihilate_node(int(data.get("photons", 1)))
    fixed = {"copy": COPY, "merge": MERGE, "unit": UNIT, "discard": DISCARD, "swap": SWAP}
    if kind not in fixed:
        raise DomainError(f"unknown generator {kind!r}")
    return fixed[kind]


def diagram_to_json(d: Diagram) -> dict:
    return {
        "dom": d.dom,
        "cod": d.cod,
        "nodes": [node_to_json(n) for n in d.nodes],
        "wires": [{"from": list(d.wires[t]), "to": list(t)} for t in sorted(d.wires)],
    }


def diagram_from_json(data: dict) -> Diagram:
    try:
        nodes = {k: node_from_json(n) for k, n in enumerate(data["nodes"])}
        wires = {tuple(w["to"]): tuple(w["from"]) for w in data["wires"]}
        return from_graph(Diagram, int(data["dom"]), int(data["cod"]), nodes, wires)
    except (KeyError, TypeError, ValueError) as err:
        raise DomainError(f"malformed diagram JSON: {err}") from err
