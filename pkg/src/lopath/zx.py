"""ZX diagrams, their qubit semantics and dual-rail compilation to QPath.

Qubit ``k`` lives on modes ``(2k, 2k + 1)``: the first is the V rail and
the second the H rail, so ``|0> = |H> = |0, 1>`` and ``|1> = |V> = |1, 0>``.
Compiled gadgets reproduce the ZX map on dual-rail inputs and outputs up to
a non-zero global scalar, which post-selection leaves behind.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lopath import path
from lopath.circuits import Circuit, Phase, BS
from lopath.diagram import BOUNDARY, Builder, Diagram, Node, from_graph
from lopath.errors import DomainError, SizeLimitError
from lopath.fock import enumerate_basis
from lopath.path import NormalForm, canonical_diagram, rewrite
from lopath.qpath import open_amplitude

#: Largest qubit count handled by :func:`zx_to_qubit_matrix`.
QUBIT_LIMIT = 10

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


class ZXDiagram(Diagram):
    """Diagram whose nodes are ``Z``/``X`` spiders (param = phase) and ``H`` boxes."""

    def _check(self):
        for node in self.nodes:
            if node.kind not in ("Z", "X", "H"):
                raise DomainError(f"{node.kind!r} is not a ZX generator")
        super()._check()


def spider_node(color: str, n_in: int, n_out: int, phase: float = 0.0) -> Node:
    if color not in ("Z", "X"):
        raise DomainError(f"unknown spider colour {color!r}")
    if n_in < 0 or n_out < 0:
        raise DomainError("spider arities must be non-negative")
    if not math.isfinite(phase):
        raise DomainError("spider phase must be finite")
    return Node(color, n_in, n_out, float(phase))


H_NODE = Node("H", 1, 1)


def z_spider(n_in: int, n_out: int, phase: float = 0.0) -> ZXDiagram:
    return ZXDiagram.box(spider_node("Z", n_in, n_out, phase))


def x_spider(n_in: int, n_out: int, phase: float = 0.0) -> ZXDiagram:
    return ZXDiagram.box(spider_node("X", n_in, n_out, phase))


def hadamard() -> ZXDiagram:
    return ZXDiagram.box(H_NODE)


# -- qubit semantics ---------------------------------------------------------


def _kron_power(M: np.ndarray, n: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for _ in range(n):
        out = np.kron(out, M)
    return out


def generator_matrix(node: Node) -> np.ndarray:
    """``2^n_out x 2^n_in`` matrix of a single ZX generator."""
    if node.kind == "H":
        return HADAMARD.astype(complex)
    n, m = node.n_in, node.n_out
    Z = np.zeros((2**m, 2**n), dtype=complex)
    Z[0, 0] += 1
    Z[-1, -1] += cmath.exp(1j * node.param)
    if node.kind == "Z":
        return Z
    return _kron_power(HADAMARD, m) @ Z @ _kron_power(HADAMARD, n)


def zx_to_qubit_matrix(d: Diagram) -> np.ndarray:
    """Standard interpretation as a ``2^cod x 2^dom`` matrix (first qubit most significant)."""
    if max(d.dom, d.cod) > QUBIT_LIMIT:
        raise SizeLimitError(f"qubit semantics limited to {QUBIT_LIMIT} qubits")
    T = np.eye(2**d.dom, dtype=complex).reshape((2,) * d.dom + (2**d.dom,))
    live = [(BOUNDARY, i) for i in range(d.dom)]
    for k, node in enumerate(d.nodes):
        ins = d.inputs_of(k)
        axes = [live.index(p) for p in ins]
        G = generator_matrix(node).reshape((2,) * (node.n_out + node.n_in))
        T = np.tensordot(G, T, axes=(list(range(node.n_out, node.n_out + node.n_in)), axes))
        live = [(k, j) for j in range(node.n_out)] + [p for p in live if p not in ins]
        if len(live) > 2 * QUBIT_LIMIT:
            raise SizeLimitError("intermediate tensor too large")
    order = [live.index(p) for p in d.outputs]
    return np.transpose(T, order + [len(live)]).reshape(2**d.cod, 2**d.dom)


# -- JSON ----------------------------------------------------------------------


def zx_to_json(d: Diagram) -> dict:
    """Spiders first, then Hadamard boxes; wires use node ``-1`` for the boundary."""
    spiders = [k for k, node in enumerate(d.nodes) if node.kind != "H"]
    hads = [k for k, node in enumerate(d.nodes) if node.kind == "H"]
    index = {k: i for i, k in enumerate(spiders + hads)}
    index[BOUNDARY] = BOUNDARY
    return {
        "qubits_in": d.dom,
        "qubits_out": d.cod,
        "spiders": [
            {"color": d.nodes[k].kind, "phase": d.nodes[k].param, "in": d.nodes[k].n_in, "out": d.nodes[k].n_out}
            for k in spiders
        ],
        "hadamards": [{} for _ in hads],
        "wires": [
            {"from": [index[s[0]], s[1]], "to": [index[t[0]], t[1]]}
            for t, s in sorted(d.wires.items(), key=lambda tw: (index[tw[0][0]], tw[0][1]))
        ],
    }


def zx_from_json(data: dict) -> ZXDiagram:
    try:
        dom, cod = int(data["qubits_in"]), int(data["qubits_out"])
        nodes = [
            spider_node(str(s["color"]), int(s["in"]), int(s["out"]), float(s.get("phase", 0.0)))
            for s in data.get("spiders", [])
        ]
        nodes += [H_NODE for _ in data.get("hadamards", [])]
        wires = {}
        for w in data["wires"]:
            t, s = (int(w["to"][0]), int(w["to"][1])), (int(w["from"][0]), int(w["from"][1]))
            if t in wires:
                raise DomainError(f"port {t} wired twice")
            wires[t] = s
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise DomainError(f"malformed ZX JSON: {err}") from err
    for n, _ in list(wires) + list(wires.values()):
        if n != BOUNDARY and not 0 <= n < len(nodes):
            raise DomainError(f"wire refers to unknown node {n}")
    try:
        return from_graph(ZXDiagram, dom, cod, dict(enumerate(nodes)), wires)
    except ValueError as err:
        raise DomainError(f"invalid ZX wiring: {err}") from err


# -- dual-rail gadgets -----------------------------------------------------------

V_RAIL, H_RAIL = 0, 1


def _lo(c: Circuit) -> Diagram:
    return path.lo_to_path(c)


def gadget_qubit_state(b: str = "H") -> Diagram:
    """One photon on the H or V rail of a fresh qubit."""
    if b == "H":
        return path.unit() @ path.create(1)
    if b == "V":
        return path.create(1) @ path.unit()
    raise DomainError(f"unknown basis state {b!r}")


def gadget_z_effect(b: str = "H") -> Diagram:
    """Post-select the photon on the H or V rail."""
    if b == "H":
        return path.discard() @ path.annihilate(1)
    if b == "V":
        return path.annihilate(1) @ path.discard()
    raise DomainError(f"unknown basis effect {b!r}")


def gadget_basis_change(which: str = "H") -> Diagram:
    """Beam splitter gadgets ``BS_H`` (Hadamard), ``BS_X`` and ``BS_Y``.

    On the qubit subspace they act, up to a global phase, as the Hadamard,
    ``exp(-i pi/4 Y)`` and ``exp(-i pi/4 X)`` respectively.
    """
    half = math.pi / 2
    if which == "H":
        c = Circuit(2, (Phase(half, V_RAIL), BS(0), Phase(half, V_RAIL)))
    elif which == "X":
        c = Circuit(2, (Phase(-half, V_RAIL), BS(0), Phase(half, V_RAIL)))
    elif which == "Y":
        c = Circuit(2, (BS(0),))
    else:
        raise DomainError(f"unknown basis change {which!r}")
    return _lo(c)


def gadget_z_phase(alpha: float) -> Diagram:
    return _lo(Circuit(2, (Phase(alpha, V_RAIL),)))


def gadget_x_state(sign: str = "+") -> Diagram:
    return gadget_qubit_state("H" if sign == "+" else "V") >> gadget_basis_change("H")


def gadget_x_effect(sign: str = "+") -> Diagram:
    """``<+|`` or ``<-|``: a Hadamard beam splitter followed by a detector."""
    if sign not in "+-" or len(sign) != 1:
        raise DomainError(f"unknown sign {sign!r}")
    return gadget_basis_change("H") >> gadget_z_effect("H" if sign == "+" else "V")


def gadget_fusion() -> Diagram:
    """Two qubits to one: the ``(2, 1)`` Z spider up to scalar.

    The H rail of the first qubit and the V rail of the second meet on a
    beam splitter; exactly one photon must come out on the detected port.
    """
    body = _lo(Circuit(4, (Phase(-math.pi / 2, 1), BS(1))))
    b = Builder(4)
    out = b.embed(body, b.inputs)
    b.add(path.annihilate_node(1), out[1])
    b.add(path.DISCARD, out[2])
    return b.build([out[0], out[3]])


# rows: four single-photon sources; columns: modes (V_a, H_a, V_b, H_b) then two detectors
_BELL_WEIGHTS = {
    "+": ((1, 1, 1, -1), (1, 1, -1, 1)),
    "-": ((1, 1, 1, 1), (1, 1, -1, -1)),
}
_BELL_MODES = (0, 2, 1, 3)


def gadget_bell(sign: str = "+") -> Diagram:
    """Heralded Bell state ``|HH> + |VV>`` (``-`` for the minus sign).

    Four photons are created; each either leaves on its own mode or is
    routed to one of two detectors that must each see one photon.
    Interference on the detectors cancels the ``HV`` and ``VH`` terms.
    """
    if sign not in _BELL_WEIGHTS:
        raise DomainError(f"unknown sign {sign!r}")
    v, w = _BELL_WEIGHTS[sign]
    W = np.zeros((4, 6), dtype=complex)
    for i in range(4):
        W[i, _BELL_MODES[i]] = 1
        W[i, 4] = v[i]
        W[i, 5] = w[i]
    return canonical_diagram(W, 0, 4)


def gadget_copy_spider() -> Diagram:
    """The ``(1, 2)`` Z spider: fuse the input with half of a Bell pair."""
    b = Builder(2)
    bell = b.embed(gadget_bell("+"), [])
    fused = b.embed(gadget_fusion(), list(b.inputs) + bell[:2])
    return b.build(fused + bell[2:])


def gadget_ghz() -> Diagram:
    """Three-qubit GHZ state from a Bell pair and a copy spider."""
    b = Builder(0)
    bell = b.embed(gadget_bell("+"), [])
    copied = b.embed(gadget_copy_spider(), bell[2:])
    return b.build(bell[:2] + copied)


def gadget_pbs() -> Diagram:
    """Polarising beam splitter on two qubits: H rails transmit, V rails swap."""
    return Diagram.permutation([2, 1, 0, 3])


def gadget_pbs_fusion() -> Diagram:
    """Post-selected fusion: PBS, then measure the second output in ``<+|``."""
    return gadget_pbs() >> (Diagram.id(2) @ gadget_x_effect("+"))


def gadget_pbs_fusion_transpose() -> Diagram:
    """Transpose of the fusion: a ``|+>`` ancilla through the PBS copies the input."""
    return (Diagram.id(2) @ gadget_x_state("+")) >> gadget_pbs()


def gadget_pbs_bell() -> Diagram:
    """Two ``|+>`` photons through a PBS; post-selected on one photon per qubit
    this is the Bell state ``|HH> + |VV>``."""
    return (gadget_x_state("+") @ gadget_x_state("+")) >> gadget_pbs()


# -- compilation --------------------------------------------------------------


def _z_gadget(n: int, m: int, alpha: float) -> Diagram:
    b = Builder(2 * n)
    qubits = [list(b.inputs[2 * i : 2 * i + 2]) for i in range(n)]
    if n == 0:
        if m == 0:
            (c,) = b.add(path.create_node(1))
            (s,) = b.add(path.scalar_node(1 + cmath.exp(1j * alpha)), c)
            b.add(path.annihilate_node(1), s)
            return b.build([])
        if m == 1:
            q = b.embed(gadget_qubit_state("H") >> gadget_basis_change("H"), [])
            outs = [q]
        else:
            pair = b.embed(gadget_bell("+"), [])
            outs = [pair[:2], pair[2:]]
        if alpha:
            outs[0] = b.embed(gadget_z_phase(alpha), outs[0])
        start = len(outs)
    else:
        q = qubits[0]
        for other in qubits[1:]:
            q = b.embed(gadget_fusion(), q + other)
        if alpha:
            q = b.embed(gadget_z_phase(alpha), q)
        if m == 0:
            b.embed(gadget_x_effect("+"), q)
            return b.build([])
        outs = [q]
        start = 1
    for _ in range(start, m):
        last = outs.pop()
        pair = b.embed(gadget_copy_spider(), last)
        outs += [pair[:2], pair[2:]]
    return b.build([p for q in outs for p in q])


def generator_gadget(node: Node) -> Diagram:
    """QPath gadget on ``2 * n_in`` modes to ``2 * n_out`` modes for one ZX generator."""
    if node.kind == "H":
        return gadget_basis_change("H")
    if node.kind == "Z":
        return _z_gadget(node.n_in, node.n_out, node.param)
    if node.kind == "X":
        hs_in = path.tensor_all([gadget_basis_change("H")] * node.n_in)
        hs_out = path.tensor_all([gadget_basis_change("H")] * node.n_out)
        return hs_in >> _z_gadget(node.n_in, node.n_out, node.param) >> hs_out
    raise DomainError(f"{node.kind!r} is not a ZX generator")


def compile_zx(d: Diagram) -> Diagram:
    """Dual-rail compilation: every qubit wire becomes a pair of modes."""
    return d.map_nodes(generator_gadget, cls=Diagram, scale=2)


def euler_zxz(U) -> tuple[float, float, float]:
    """Angles with ``U ~ Z(c) H Z(b) H Z(a)`` up to global phase (``a`` applied first)."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise DomainError("euler_zxz expects a 2x2 matrix")
    V = U / np.sqrt(np.linalg.det(U))
    # V = Rz(c) Rx(b) Rz(a) in SU(2)
    b = 2 * math.atan2(abs(V[1, 0]), abs(V[0, 0]))
    s = cmath.phase(V[1, 1]) if abs(V[0, 0]) > 1e-12 else 0.0
    t = cmath.phase(V[1, 0]) + math.pi / 2 if abs(V[1, 0]) > 1e-12 else 0.0
    # V[1,1] = e^{i(a+c)/2} cos(b/2), V[1,0] = -i e^{i(c-a)/2} sin(b/2)
    if abs(V[1, 0]) <= 1e-12:
        return 0.0, 0.0, 2 * s
    if abs(V[0, 0]) <= 1e-12:
        return -t, b, t
    return s - t, b, s + t


def single_qubit_zx(U) -> ZXDiagram:
    """ZX diagram of a single-qubit unitary from Z phases and Hadamards."""
    a, b, c = euler_zxz(U)
    return z_spider(1, 1, a) >> hadamard() >> z_spider(1, 1, b) >> hadamard() >> z_spider(1, 1, c)


# -- verification ----------------------------------------------------------------


def dual_rail_occupation(bits: Sequence[int]) -> tuple[int, ...]:
    """``0 = H -> (0, 1)`` and ``1 = V -> (1, 0)`` per qubit."""
    return tuple(x for bit in bits for x in ((0, 1) if bit == 0 else (1, 0)))


def projected_matrix(compiled: Diagram | NormalForm, n_in: int, n_out: int) -> np.ndarray:
    """Amplitudes between dual-rail basis states, indexed like qubit matrices."""
    nf = compiled if isinstance(compiled, NormalForm) else rewrite(compiled)
    A = np.zeros((2**n_out, 2**n_in), dtype=complex)
    for c, x in enumerate(itertools.product((0, 1), repeat=n_in)):
        for r, y in enumerate(itertools.product((0, 1), repeat=n_out)):
            A[r, c] = open_amplitude(nf, dual_rail_occupation(x), dual_rail_occupation(y))
    return A


@dataclass
class EncodingReport:
    """Comparison of a compiled gadget with its ZX target.

    ``leakage`` is the weight sent to photon-number sectors other than one
    photon per output qubit; ``offspace`` is the weight that stays in the
    right sector but leaves the dual-rail subspace (discarded by
    post-selection).

    ``success_probability`` is ``|scalar|^2``. It is a genuine probability
    only for gadgets whose weights come from unitary optics; gadgets built
    from unnormalised Bell-pair weights can exceed 1.
    """

    scalar: complex
    max_dev: float
    leakage: float
    offspace: float

    @property
    def success_probability(self) -> float:
        return abs(self.scalar) ** 2

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_dev < tol and self.leakage == 0 and abs(self.scalar) > tol

    def to_json(self) -> dict:
        return {
            "scalar": {"re": self.scalar.real, "im": self.scalar.imag},
            "max_dev": self.max_dev,
            "leakage": self.leakage,
            "offspace": self.offspace,
            "success_probability": self.success_probability,
        }


def verify_encoding(zx: Diagram, compiled: Diagram) -> EncodingReport:
    if compiled.dom != 2 * zx.dom or compiled.cod != 2 * zx.cod:
        raise DomainError("compiled diagram does not act on the dual-rail modes of the ZX diagram")
    target = zx_to_qubit_matrix(zx)
    nf = rewrite(compiled)
    A = projected_matrix(nf, zx.dom, zx.cod)
    norm = np.vdot(target, target).real
    lam = complex(np.vdot(target, A) / norm) if norm else 0j
    max_dev = float(np.max(np.abs(A - lam * target)) / abs(lam)) if abs(lam) > 0 else math.inf

    dual = {dual_rail_occupation(y) for y in itertools.product((0, 1), repeat=zx.cod)}
    leakage = offspace = 0.0
    for x in itertools.product((0, 1), repeat=zx.dom):
        n_out = zx.dom + nf.n_creations - nf.n_annihilations
        if n_out < 0:
            continue
        for y in enumerate_basis(2 * zx.cod, n_out):
            if y in dual:
                continue
            w = abs(open_amplitude(nf, dual_rail_occupation(x), y)) ** 2
            if n_out == zx.cod:
                offspace += w
            else:
                leakage += w
    return EncodingReport(lam, max_dev, leakage, offspace)
