"""Port-graph representation of string diagrams.

A diagram has ``dom`` input wires, ``cod`` output wires and a list of
nodes kept in topological order. Ports are ``(node, index)`` pairs; the
boundary uses node ``-1`` on both sides, so ``(-1, i)`` is the i-th input
when used as a source and the i-th output when used as a target. Each
target port is wired to exactly one source port and vice versa; symmetry
is implicit in the wiring.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Sequence

from lopath.errors import CompositionError, DomainError

BOUNDARY = -1

Port = tuple[int, int]


@dataclass(frozen=True)
class Node:
    kind: str
    n_in: int
    n_out: int
    param: Any = None

    def __repr__(self):
        if self.param is None:
            return f"{self.kind}({self.n_in}->{self.n_out})"
        return f"{self.kind}[{self.param!r}]({self.n_in}->{self.n_out})"


class Diagram:
    """Immutable port graph. Use :class:`Builder` or composition to make one."""

    def __init__(self, dom: int, cod: int, nodes: Sequence[Node], wires: dict[Port, Port]):
        self.dom = dom
        self.cod = cod
        self.nodes = tuple(nodes)
        self.wires = dict(wires)
        self._check()

    def _check(self):
        targets = [(BOUNDARY, j) for j in range(self.cod)]
        sources = {(BOUNDARY, i) for i in range(self.dom)}
        for k, node in enumerate(self.nodes):
            targets += [(k, p) for p in range(node.n_in)]
            sources |= {(k, p) for p in range(node.n_out)}
        if set(self.wires) != set(targets):
            raise CompositionError("every target port must be wired exactly once")
        used = list(self.wires.values())
        if len(set(used)) != len(used) or set(used) != sources:
            raise CompositionError("every source port must be wired exactly once")
        for (k, _), (s, _) in self.wires.items():
            if k != BOUNDARY and s != BOUNDARY and s >= k:
                raise CompositionError("nodes are not in topological order")

    # -- construction -----------------------------------------------------

    @classmethod
    def id(cls, n: int) -> "Diagram":
        return cls(n, n, (), {(BOUNDARY, i): (BOUNDARY, i) for i in range(n)})

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "Diagram":
        """Wire permutation sending input ``i`` to output ``perm[i]``."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise DomainError(f"{perm} is not a permutation")
        return cls(n, n, (), {(BOUNDARY, perm[i]): (BOUNDARY, i) for i in range(n)})

    @classmethod
    def box(cls, node: Node) -> "Diagram":
        b = Builder(node.n_in, cls)
        return b.build(b.add(node, *b.inputs))

    def then(self, other: "Diagram") -> "Diagram":
        """Sequential composition, ``self`` first."""
        if self.cod != other.dom:
            raise CompositionError(f"cannot compose cod {self.cod} with dom {other.dom}")
        b = Builder(self.dom, type(self))
        return b.build(b.embed(other, b.embed(self, b.inputs)))

    def tensor(self, other: "Diagram") -> "Diagram":
        """Parallel composition, ``other`` below ``self``."""
        b = Builder(self.dom + other.dom, type(self))
        left = b.embed(self, b.inputs[: self.dom])
        right = b.embed(other, b.inputs[self.dom :])
        return b.build(left + right)

    __rshift__ = then
    __matmul__ = tensor

    def on_wires(self, width: int, wires: Sequence[int]) -> "Diagram":
        """Place ``self`` on the given wires of a ``width``-wire identity."""
        if len(wires) != self.dom or self.dom != self.cod:
            raise CompositionError("on_wires needs an endomorphism matching the wire count")
        b = Builder(width, type(self))
        ports = list(b.inputs)
        outs = b.embed(self, [ports[w] for w in wires])
        for w, p in zip(wires, outs):
            ports[w] = p
        return b.build(ports)

    # -- inspection -------------------------------------------------------

    def successors(self) -> dict[Port, Port]:
        """Map from each source port to the target port it feeds."""
        return {s: t for t, s in self.wires.items()}

    def inputs_of(self, k: int) -> list[Port]:
        return [self.wires[(k, p)] for p in range(self.nodes[k].n_in)]

    @property
    def outputs(self) -> list[Port]:
        return [self.wires[(BOUNDARY, j)] for j in range(self.cod)]

    def count(self, kind: str) -> int:
        return sum(node.kind == kind for node in self.nodes)

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and (self.dom, self.cod, self.nodes) == (other.dom, other.cod, other.nodes)
            and self.wires == other.wires
        )

    def __hash__(self):
        return hash((self.dom, self.cod, self.nodes))

    def __repr__(self):
        return f"{type(self).__name__}(dom={self.dom}, cod={self.cod}, nodes={list(self.nodes)})"

    def map_nodes(self, fn: Callable[[Node], "Diagram"], cls=None, scale: int = 1) -> "Diagram":
        """Apply a functor that sends each node to a diagram.

        Every wire of ``self`` becomes ``scale`` wires of the result, so ``fn``
        must return a diagram with ``scale * n_in`` inputs and
        ``scale * n_out`` outputs.
        """
        cls = cls or type(self)
        b = Builder(scale * self.dom, cls)
        src: dict[Port, list[Port]] = {
            (BOUNDARY, i): list(b.inputs[scale * i : scale * (i + 1)]) for i in range(self.dom)
        }
        for k, node in enumerate(self.nodes):
            image = fn(node)
            if image.dom != scale * node.n_in or image.cod != scale * node.n_out:
                raise CompositionError(f"image of {node} has wrong arity")
            ins = [p for port in self.inputs_of(k) for p in src[port]]
            outs = b.embed(image, ins)
            for j in range(node.n_out):
                src[(k, j)] = outs[scale * j : scale * (j + 1)]
        return b.build([p for port in self.outputs for p in src[port]])


class Builder:
    """Incremental construction of a diagram in topological order.

    >>> b = Builder(1)
    >>> x, = b.inputs
    >>> y, z = b.add(Node("copy", 1, 2), x)
    >>> d = b.build([z, y])
    """

    def __init__(self, dom: int, cls=Diagram):
        self.dom = dom
        self.cls = cls
        self.nodes: list[Node] = []
        self.wires: dict[Port, Port] = {}
        self._used: set[Port] = set()
        self.inputs: list[Port] = [(BOUNDARY, i) for i in range(dom)]

    def _use(self, port: Port):
        if port in self._used:
            raise CompositionError(f"source port {port} used twice")
        self._used.add(port)

    def add(self, node: Node, *ports: Port) -> list[Port]:
        if len(ports) != node.n_in:
            raise CompositionError(f"{node} expects {node.n_in} inputs, got {len(ports)}")
        k = len(self.nodes)
        for p in ports:
            self._use(p)
        self.nodes.append(node)
        for i, p in enumerate(ports):
            self.wires[(k, i)] = p
        return [(k, j) for j in range(node.n_out)]

    def embed(self, d: Diagram, ports: Sequence[Port]) -> list[Port]:
        """Insert a copy of ``d`` fed by ``ports``; return the ports of its outputs."""
        if len(ports) != d.dom:
            raise CompositionError(f"embedding needs {d.dom} ports, got {len(ports)}")
        offset = len(self.nodes)

        def mapped(port: Port) -> Port:
            node, idx = port
            return ports[idx] if node == BOUNDARY else (node + offset, idx)

        for k, node in enumerate(d.nodes):
            self.add(node, *(mapped(p) for p in d.inputs_of(k)))
        return [mapped(p) for p in d.outputs]

    def build(self, outputs: Sequence[Port]) -> Diagram:
        wires = dict(self.wires)
        for j, p in enumerate(outputs):
            self._use(p)
            wires[(BOUNDARY, j)] = p
        return self.cls(self.dom, len(outputs), self.nodes, wires)


def from_graph(cls, dom: int, cod: int, nodes: dict[int, Node], wires: dict[Port, Port]) -> Diagram:
    """Build a diagram from arbitrarily numbered nodes, sorting them topologically.

    Ties are broken by the original node number, so the result is
    deterministic.
    """
    deps: dict[int, set[int]] = {k: set() for k in nodes}
    users: dict[int, set[int]] = {k: set() for k in nodes}
    for (t, _), (s, _) in wires.items():
        if t != BOUNDARY and s != BOUNDARY:
            deps[t].add(s)
            users[s].add(t)
    ready = [k for k, d in deps.items() if not d]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        k = heapq.heappop(ready)
        order.append(k)
        for u in users[k]:
            deps[u].discard(k)
            if not deps[u]:
                heapq.heappush(ready, u)
    if len(order) != len(nodes):
        raise CompositionError("diagram wiring has a cycle")
    index = {k: i for i, k in enumerate(order)}

    def renum(port: Port) -> Port:
        n, p = port
        return port if n == BOUNDARY else (index[n], p)

    new_wires = {renum(t): renum(s) for t, s in wires.items()}
    return cls(dom, cod, [nodes[k] for k in order], new_wires)


def iter_ports(d: Diagram) -> Iterator[tuple[Port, Port]]:
    """Yield ``(source, target)`` pairs in a deterministic order."""
    for t in sorted(d.wires):
        yield d.wires[t], t
