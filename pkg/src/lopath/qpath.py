"""QPath: Path diagrams with photon creation and annihilation.

Two evaluation routes are provided and cross-checked in the tests:

* :func:`eval_open` contracts the bosonic semantics of every generator on
  number states truncated at ``cutoff`` photons per wire;
* :func:`eval_closed` rewrites a closed diagram to a bipartite graph of
  single-photon endpoints plus a scalar, and returns the scalar times the
  permanent of the graph (the sum over its perfect matchings).

:func:`open_amplitude` extends the second route to open diagrams by
feeding number states into the normal form of the diagram.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from lopath import path
from lopath.circuits import Circuit
from lopath.diagram import BOUNDARY, Builder, Diagram, Node, Port
from lopath.errors import DomainError, ShapeError, SizeLimitError
from lopath.fock import norm_constant, occupation
from lopath.linalg import NAIVE_LIMIT, permanent, permanent_ryser
from lopath.path import NormalForm, WeightedBipartiteGraph, graph_to_dot, rewrite

#: Largest dimension of the truncated space handled by :func:`eval_open`.
OPEN_LIMIT = 10**6


class ContractError(DomainError):
    """Raised when a closed-diagram operation receives an open diagram."""


# -- bosonic semantics ------------------------------------------------------


def _sqrt(x: int, exact: bool):
    if exact:
        import sympy

        return sympy.sqrt(x)
    return math.sqrt(x)


def _weight(w: complex, exact: bool):
    if not exact:
        return complex(w)
    import sympy

    re, im = w.real, w.imag
    conv = lambda x: sympy.Integer(int(x)) if float(x).is_integer() else sympy.Float(x)  # noqa: E731
    return conv(re) + sympy.I * conv(im)


def bosonic_semantics(g: Node, cutoff: int, exact: bool = False) -> np.ndarray:
    """Matrix of a generator on number states ``|0>, ..., |cutoff>`` of each wire.

    Multi-wire bases are indexed in base ``cutoff + 1`` with the first wire
    most significant. Components that would need more than ``cutoff``
    photons on a wire are dropped. With ``exact`` the entries are sympy
    numbers, so square roots cancel symbolically.
    """
    if cutoff < 0:
        raise DomainError("cutoff must be non-negative")
    D = cutoff + 1
    dtype = object if exact else complex
    zero = 0 if exact else 0j
    out = np.full((D**g.n_out, D**g.n_in), zero, dtype=dtype)
    kind = g.kind
    if kind == "copy":
        for n in range(D):
            for k in range(n + 1):
                out[k * D + (n - k), n] = _sqrt(math.comb(n, k), exact)
    elif kind == "merge":
        for k in range(D):
            for l in range(D - k):
                out[k + l, k * D + l] = _sqrt(math.comb(k + l, k), exact)
    elif kind in ("unit", "create"):
        n = g.param or 0
        if n <= cutoff:
            out[n, 0] = 1
    elif kind in ("discard", "annihilate"):
        n = g.param or 0
        if n <= cutoff:
            out[0, n] = 1
    elif kind == "swap":
        for a in range(D):
            for b in range(D):
                out[b * D + a, a * D + b] = 1
    elif kind == "scalar":
        r = _weight(g.param, exact)
        for n in range(D):
            out[n, n] = r**n
    else:
        raise DomainError(f"{kind!r} is not a QPath generator")
    return out


def created_photons(d: Diagram) -> int:
    return sum(node.param for node in d.nodes if node.kind == "create")


def _contract(d: Diagram, cutoff: int, exact: bool) -> np.ndarray:
    D = cutoff + 1
    if D ** (d.dom + d.cod) > OPEN_LIMIT**2:
        raise SizeLimitError("truncated operator too large")
    dtype = object if exact else complex
    eye = np.eye(D**d.dom, dtype=int).astype(dtype)
    T = eye.reshape((D,) * d.dom + (D**d.dom,))
    live: list[Port] = [(BOUNDARY, i) for i in range(d.dom)]
    for k, node in enumerate(d.nodes):
        ins = d.inputs_of(k)
        axes = [live.index(p) for p in ins]
        G = bosonic_semantics(node, cutoff, exact).reshape((D,) * (node.n_out + node.n_in))
        T = np.tensordot(G, T, axes=(list(range(node.n_out, node.n_out + node.n_in)), axes))
        live = [(k, j) for j in range(node.n_out)] + [p for p in live if p not in ins]
        if D ** len(live) * D**d.dom > OPEN_LIMIT**2:
            raise SizeLimitError("intermediate tensor too large; lower the cutoff")
    order = [live.index(p) for p in d.outputs]
    T = np.transpose(T, order + [len(live)])
    return T.reshape(D**d.cod, D**d.dom)


def eval_open(d: Diagram, cutoff: int | None = None, check: bool = False, exact: bool = False) -> np.ndarray:
    """Bosonic semantics of ``d`` truncated at ``cutoff`` photons per wire.

    Returns a ``(cutoff+1)^cod x (cutoff+1)^dom`` matrix. Entries whose
    input carries ``t`` photons are exact whenever ``t`` plus the photons
    created inside ``d`` is at most ``cutoff``; the default cutoff is the
    number of created photons, which makes closed diagrams exact. With
    ``check`` the result is recomputed at ``cutoff + 1`` and the common
    entries compared.
    """
    cutoff = created_photons(d) if cutoff is None else cutoff
    out = _contract(d, cutoff, exact)
    if check:
        bigger = _contract(d, cutoff + 1, exact)
        rows = _truncated_indices(d.cod, cutoff)
        cols = _truncated_indices(d.dom, cutoff)
        sub = bigger[np.ix_(rows, cols)]
        budget = cutoff - created_photons(d)
        for c, occ in enumerate(itertools.product(range(cutoff + 1), repeat=d.dom)):
            if sum(occ) > budget:
                continue
            if not np.allclose(np.asarray(sub[:, c], dtype=complex), np.asarray(out[:, c], dtype=complex), atol=1e-10):
                raise AssertionError("eval_open depends on the cutoff")
    return out


def _truncated_indices(wires: int, cutoff: int) -> list[int]:
    D = cutoff + 2
    return [
        sum(x * D ** (wires - 1 - i) for i, x in enumerate(occ))
        for occ in itertools.product(range(cutoff + 1), repeat=wires)
    ]


def number_state_index(occ: Sequence[int], cutoff: int) -> int:
    """Row or column of ``|occ>`` in a truncated tensor-power basis."""
    idx = 0
    for x in occ:
        if not 0 <= x <= cutoff:
            raise DomainError(f"occupation {x} outside cutoff {cutoff}")
        idx = idx * (cutoff + 1) + x
    return idx


# -- events and normal forms --------------------------------------------------


def event_diagram(c: Circuit, I: Sequence[int], J: Sequence[int]) -> Diagram:
    """Closed diagram ``<J| F(c) |I>``: creations ``I`` on inputs, annihilations ``J`` on outputs."""
    I, J = occupation(I), occupation(J)
    if len(I) != c.width or len(J) != c.width:
        raise ShapeError(f"occupations of length {len(I)}, {len(J)} for {c.width} modes")
    states = path.tensor_all([path.create(n) for n in I])
    effects = path.tensor_all([path.annihilate(n) for n in J])
    return states >> path.lo_to_path(c) >> effects


@dataclass
class NormalizedGraph:
    """Normal form of a closed diagram: single-photon creations on the left,
    annihilations on the right, and the scalar picked up on the way."""

    graph: WeightedBipartiteGraph
    norm_factor: complex

    @property
    def balanced(self) -> bool:
        return self.graph.left_size == self.graph.right_size

    def to_dot(self, name: str = "normal_form") -> str:
        return graph_to_dot(self.graph, name, left="c", right="a")


def normalize_closed(d: Diagram, on_step=None) -> NormalizedGraph:
    if d.dom != 0 or d.cod != 0:
        raise ContractError(f"expected a closed diagram, got {d.dom} -> {d.cod}")
    nf = rewrite(d, on_step)
    return NormalizedGraph(nf.graph, nf.factor)


def eval_closed(d: Diagram) -> complex:
    """``N_d`` times the sum over perfect matchings of ``G_d``."""
    ng = normalize_closed(d)
    if not ng.balanced:
        return 0j
    return complex(ng.norm_factor * permanent(ng.graph.weights))


def perfect_matchings(g: WeightedBipartiteGraph, limit: int = NAIVE_LIMIT) -> Iterator[tuple[tuple[int, ...], complex]]:
    """Yield ``(sigma, weight)`` for every perfect matching ``i -> sigma[i]``.

    Products are accumulated in the same order as
    :func:`lopath.linalg.permanent_naive`, so the weights sum to it
    bit-for-bit.
    """
    if g.left_size != g.right_size:
        raise ShapeError("perfect matchings need equal sides")
    n = g.left_size
    if n > limit:
        raise SizeLimitError(f"matching enumeration limited to {limit} nodes per side")
    rows = g.weights.tolist()
    for sigma in itertools.permutations(range(n)):
        prod = 1
        for i, j in enumerate(sigma):
            prod = prod * rows[i][j]
        yield sigma, complex(prod)


def matching_sum(g: WeightedBipartiteGraph) -> complex:
    total = 0
    for _, w in perfect_matchings(g):
        total = total + w
    return complex(total)


def snap_exact(z: complex, tol: float = 1e-12):
    """Nearest number of the form ``(a + b i) / sqrt(2)^k`` as a sympy expression.

    Weights of the dual-rail gadgets all lie in this field; other values
    fall back to sympy floats.
    """
    import sympy

    def part(x: float):
        return sympy.nsimplify(x, [sympy.sqrt(2)], tolerance=tol) if abs(x) > tol else sympy.Integer(0)

    return part(z.real) + sympy.I * part(z.imag)


def open_amplitude(d: Diagram | NormalForm, x: Sequence[int], y: Sequence[int], exact: bool = False):
    """``<y| B(d) |x>`` for number states on the input and output wires.

    Uses the normal form: inputs repeated ``x`` times plus created photons
    index the rows of the permanent, outputs repeated ``y`` times plus
    annihilated photons its columns. With ``exact`` the weights are passed
    through :func:`snap_exact` and a simplified sympy number is returned.
    """
    nf = d if isinstance(d, NormalForm) else rewrite(d)
    x, y = occupation(x), occupation(y)
    if len(x) != nf.dom or len(y) != nf.cod:
        raise ShapeError(f"occupations of length {len(x)}, {len(y)} for a {nf.dom} -> {nf.cod} diagram")
    rows = np.concatenate([np.repeat(np.arange(nf.dom), x), np.arange(nf.dom, nf.graph.left_size)]).astype(int)
    cols = np.concatenate([np.repeat(np.arange(nf.cod), y), np.arange(nf.cod, nf.graph.right_size)]).astype(int)
    if len(rows) != len(cols):
        return 0j
    sub = nf.graph.weights[np.ix_(rows, cols)]
    if exact:
        import sympy

        snapped = np.array([[snap_exact(w) for w in row] for row in sub], dtype=object).reshape(sub.shape)
        value = snap_exact(nf.factor) * permanent_ryser(snapped) / sympy.sqrt(norm_constant(x) * norm_constant(y))
        return sympy.simplify(sympy.expand(value))
    return complex(nf.factor * permanent(sub) / math.sqrt(norm_constant(x) * norm_constant(y)))


# -- single-mode operators -----------------------------------------------------


def creation_operator() -> Diagram:
    """``a_dagger``: a single created photon merged into the wire."""
    b = Builder(1)
    (c,) = b.add(path.create_node(1))
    return b.build(b.add(path.MERGE, b.inputs[0], c))


def annihilation_operator() -> Diagram:
    """``a``: split the wire and detect one photon on the second branch."""
    b = Builder(1)
    keep, probe = b.add(path.COPY, b.inputs[0])
    b.add(path.annihilate_node(1), probe)
    return b.build([keep])


def commutator(cutoff: int, exact: bool = True) -> np.ndarray:
    """``a a_dagger - a_dagger a`` on a single mode truncated at ``cutoff``."""
    a, ad = annihilation_operator(), creation_operator()
    return eval_open(ad >> a, cutoff, exact=exact) - eval_open(a >> ad, cutoff, exact=exact)


# -- JSON requests -----------------------------------------------------------


def evaluate_event(request: dict) -> dict:
    """Answer ``{"circuit", "input", "output"}`` with the amplitude and probability."""
    try:
        c = Circuit.from_json(request["circuit"])
        I, J = list(request["input"]), list(request["output"])
    except (KeyError, TypeError) as err:
        raise DomainError(f"malformed event request: {err}") from err
    amp = eval_closed(event_diagram(c, I, J))
    return {"amplitude": {"re": amp.real, "im": amp.imag}, "probability": abs(amp) ** 2}


__all__ = [
    "ContractError",
    "NormalizedGraph",
    "annihilation_operator",
    "bosonic_semantics",
    "commutator",
    "created_photons",
    "creation_operator",
    "eval_closed",
    "eval_open",
    "evaluate_event",
    "event_diagram",
    "matching_sum",
    "normalize_closed",
    "number_state_index",
    "open_amplitude",
    "perfect_matchings",
]
