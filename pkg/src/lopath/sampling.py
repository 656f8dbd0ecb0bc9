"""Random test objects: Haar unitaries, circuits, Path diagrams and events."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from lopath import path
from lopath.circuits import BS, Circuit, Phase
from lopath.diagram import Builder, Diagram
from lopath.fock import enumerate_basis


def rng_of(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_unitary(m: int, seed=None) -> np.ndarray:
    if m == 1:
        return np.exp(2j * math.pi * rng_of(seed).random()).reshape(1, 1)
    return unitary_group.rvs(m, random_state=rng_of(seed))


def random_circuit(width: int, n_gates: int, seed=None) -> Circuit:
    """Uniformly chosen beam splitters and phases (phases only when ``width == 1``)."""
    rng = rng_of(seed)
    gates = []
    for _ in range(n_gates):
        if width >= 2 and rng.random() < 0.5:
            gates.append(BS(int(rng.integers(width - 1))))
        else:
            gates.append(Phase(float(rng.uniform(0, 2 * math.pi)), int(rng.integers(width))))
    return Circuit(width, gates)


@dataclass(frozen=True)
class DiagramConfig:
    """Bounds for :func:`random_diagram`."""

    max_wires: int = 6
    max_generators: int = 12
    scalar_range: float = 2.0


def _random_scalar(rng, bound: float) -> complex:
    # small integers and Gaussian integers exercise exact cancellations
    if rng.random() < 0.3:
        return complex(int(rng.integers(-2, 3)), int(rng.integers(-1, 2)))
    return complex(*rng.uniform(-bound, bound, size=2))


def random_diagram(seed=None, config: DiagramConfig = DiagramConfig()) -> Diagram:
    """A random Path diagram respecting the wire and generator bounds.

    Wires never exceed ``max_wires`` at any point, including the boundary.
    """
    rng = rng_of(seed)
    dom = int(rng.integers(0, config.max_wires + 1))
    b = Builder(dom)
    ports = list(b.inputs)
    for _ in range(int(rng.integers(0, config.max_generators + 1))):
        choices = ["unit", "scalar"] if not ports else ["copy", "discard", "unit", "scalar", "merge", "swap"]
        if len(ports) >= config.max_wires:
            choices = [c for c in choices if c not in ("copy", "unit")]
        if len(ports) < 2:
            choices = [c for c in choices if c not in ("merge", "swap")]
        kind = choices[int(rng.integers(len(choices)))]
        if kind == "unit":
            pos = int(rng.integers(len(ports) + 1))
            ports.insert(pos, b.add(path.UNIT)[0])
            continue
        if kind == "scalar" and not ports:
            continue
        i = int(rng.integers(len(ports) - (1 if kind in ("merge", "swap") else 0)))
        if kind == "copy":
            ports[i : i + 1] = b.add(path.COPY, ports[i])
        elif kind == "discard":
            b.add(path.DISCARD, ports.pop(i))
        elif kind == "scalar":
            (ports[i],) = b.add(path.scalar_node(_random_scalar(rng, config.scalar_range)), ports[i])
        elif kind == "merge":
            ports[i : i + 2] = b.add(path.MERGE, ports[i], ports[i + 1])
        else:
            ports[i : i + 2] = b.add(path.SWAP, ports[i], ports[i + 1])
    return b.build(ports)


@dataclass(frozen=True)
class EventConfig:
    """Bounds for :func:`random_event`."""

    max_modes: int = 4
    max_photons: int = 3
    max_gates: int = 8


def random_event(seed=None, config: EventConfig = EventConfig()):
    """Random ``(circuit, I, J)`` with matching photon numbers."""
    rng = rng_of(seed)
    m = int(rng.integers(1, config.max_modes + 1))
    n = int(rng.integers(0, config.max_photons + 1))
    c = random_circuit(m, int(rng.integers(0, config.max_gates + 1)), rng)
    basis = enumerate_basis(m, n)
    I = basis[int(rng.integers(len(basis)))]
    J = basis[int(rng.integers(len(basis)))]
    return c, I, J
