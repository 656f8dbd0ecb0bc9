"""Linear optical circuits built from beam splitters and phase shifters.

A circuit is a flat, time-ordered list of gates on ``width`` modes. Its
classical interpretation is the ``width x width`` unitary acting on column
vectors of mode amplitudes, so ``U[out, in]`` is the amplitude for a single
photon to travel from mode ``in`` to mode ``out``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from lopath.errors import DomainError, ShapeError
from lopath.linalg import as_matrix, is_unitary

TWO_PI = 2 * math.pi

#: Matrix of the balanced beam splitter.
BS_MATRIX = np.array([[1j, 1], [1, 1j]]) / math.sqrt(2)


def canonical_angle(angle: float) -> float:
    """Reduce an angle to ``[0, 2 pi)``."""
    a = math.fmod(float(angle), TWO_PI)
    if a < 0:
        a += TWO_PI
    # fmod can return exactly 2 pi after the shift for tiny negative inputs
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Gate:
    """A beam splitter on modes ``(position, position + 1)`` or a phase shift on ``position``."""

    kind: str
    position: int
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in ("bs", "phase"):
            raise DomainError(f"unknown gate kind {self.kind!r}")
        if self.position < 0:
            raise DomainError(f"negative gate position {self.position}")
        if self.kind == "bs":
            object.__setattr__(self, "angle", 0.0)
        else:
            if not math.isfinite(self.angle):
                raise DomainError("phase angle must be finite")
            object.__setattr__(self, "angle", canonical_angle(self.angle))

    @property
    def arity(self) -> int:
        return 2 if self.kind == "bs" else 1

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(range(self.position, self.position + self.arity))

    def to_json(self) -> dict:
        if self.kind == "bs":
            return {"kind": "bs", "position": self.position}
        return {"kind": "phase", "position": self.position, "angle": self.angle}

    @classmethod
    def from_json(cls, data: dict) -> "Gate":
        kind = data["kind"]
        if kind == "bs":
            return cls("bs", int(data["position"]))
        return cls("phase", int(data["position"]), float(data["angle"]))


def BS(position: int = 0) -> Gate:
    return Gate("bs", position)


def Phase(angle: float, position: int = 0) -> Gate:
    return Gate("phase", position, angle)


@dataclass(frozen=True)
class Circuit:
    """Immutable LO circuit: ``width`` modes and a time-ordered gate tuple."""

    width: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 0:
            raise ShapeError("circuit width must be non-negative")
        for g in self.gates:
            if g.position + g.arity > self.width:
                raise ShapeError(f"{g} does not fit in {self.width} modes")

    def then(self, other: "Circuit") -> "Circuit":
        """Sequential composition: ``self`` first, then ``other``."""
        if self.width != other.width:
            raise ShapeError(f"cannot compose widths {self.width} and {other.width}")
        return Circuit(self.width, self.gates + other.gates)

    __rshift__ = then

    def tensor(self, other: "Circuit") -> "Circuit":
        """Parallel placement: ``other`` acts on the modes after ``self``."""
        shifted = tuple(Gate(g.kind, g.position + self.width, g.angle) for g in other.gates)
        return Circuit(self.width + other.width, self.gates + shifted)

    __matmul__ = tensor

    def add(self, *gates: Gate) -> "Circuit":
        return Circuit(self.width, self.gates + gates)

    def layers(self) -> list[list[Gate]]:
        """Greedy as-soon-as-possible layering of the gates."""
        busy = [0] * self.width
        layers: list[list[Gate]] = []
        for g in self.gates:
            depth = max(busy[k] for k in g.modes)
            if depth == len(layers):
                layers.append([])
            layers[depth].append(g)
            for k in g.modes:
                busy[k] = depth + 1
        return layers

    @property
    def depth(self) -> int:
        return len(self.layers())

    def to_json(self) -> dict:
        return {"width": self.width, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, data: dict) -> "Circuit":
        try:
            width = int(data["width"])
            gates = [Gate.from_json(g) for g in data.get("gates", [])]
        except (KeyError, TypeError, ValueError) as err:
            raise DomainError(f"malformed circuit JSON: {err}") from err
        return cls(width, gates)


def gate_matrix(gate: Gate, width: int) -> np.ndarray:
    out = np.eye(width, dtype=complex)
    p = gate.position
    if gate.kind == "bs":
        out[p : p + 2, p : p + 2] = BS_MATRIX
    else:
        out[p, p] = np.exp(1j * gate.angle)
    return out


def classical_matrix(c: Circuit) -> np.ndarray:
    """The unitary of ``c``; later gates multiply on the left."""
    U = np.eye(c.width, dtype=complex)
    for g in c.gates:
        p = g.position
        if g.kind == "bs":
            U[p : p + 2, :] = BS_MATRIX @ U[p : p + 2, :]
        else:
            U[p, :] *= np.exp(1j * g.angle)
    return U


def mzi(alpha: float, beta: float, position: int = 0, width: int | None = None) -> Circuit:
    """Mach-Zehnder interferometer on modes ``(position, position + 1)``.

    The external phase ``beta`` sits on the upper input, the internal phase
    between the two beam splitters is ``2 * alpha``; with this
    parametrisation the matrix is exactly ::

        i e^{i alpha} [[-e^{i beta} sin(alpha), cos(alpha)],
                       [ e^{i beta} cos(alpha), sin(alpha)]]
    """
    width = position + 2 if width is None else width
    return Circuit(
        width,
        (
            Phase(beta, position),
            BS(position),
            Phase(2 * alpha, position),
            BS(position),
        ),
    )


def mzi_matrix(alpha: float, beta: float) -> np.ndarray:
    s, c = math.sin(alpha), math.cos(alpha)
    e = np.exp(1j * beta)
    return 1j * np.exp(1j * alpha) * np.array([[-e * s, c], [e * c, s]])


@dataclass(frozen=True)
class MZIParams:
    """One MZI of a mesh: acts on modes ``(position, position + 1)``."""

    position: int
    alpha: float
    beta: float


# both entries below this are treated as already nulled; the MZI is then set to the bar state
_ZERO = 1e-14


def _embed2(M2: np.ndarray, k: int, m: int) -> np.ndarray:
    out = np.eye(m, dtype=complex)
    out[k : k + 2, k : k + 2] = M2
    return out


def _null_right(U, row, k):
    """MZI on columns (k, k+1) such that ``U @ T^dagger`` zeroes ``U[row, k]``."""
    a, b = U[row, k], U[row, k + 1]
    if abs(a) + abs(b) < _ZERO:
        return math.pi / 2, 0.0
    alpha = math.atan2(abs(b), abs(a))
    beta = float(np.angle(a) - np.angle(b)) if abs(a) > 0 and abs(b) > 0 else 0.0
    return alpha, beta


def _null_left(U, row, col):
    """MZI on rows (row-1, row) such that ``T @ U`` zeroes ``U[row, col]``."""
    a, b = U[row - 1, col], U[row, col]
    if abs(a) + abs(b) < _ZERO:
        return math.pi / 2, 0.0
    alpha = math.atan2(abs(a), abs(b))
    beta = float(math.pi + np.angle(b) - np.angle(a)) if abs(a) > 0 and abs(b) > 0 else 0.0
    return alpha, beta


def mesh_circuit(width: int, mzis: Iterable[MZIParams], phases: Sequence[float] | None = None) -> Circuit:
    """Expand MZI parameters (time order) and optional trailing phases into a circuit."""
    c = Circuit(width)
    for p in mzis:
        c = c.then(mzi(p.alpha, p.beta, p.position, width))
    if phases is not None:
        c = c.add(*(Phase(phi, k) for k, phi in enumerate(phases)))
    return c


def mesh_params(c: Circuit) -> list[MZIParams]:
    """Recover the MZIs of a circuit produced by :func:`mesh_circuit` (without trailing phases)."""
    if len(c.gates) % 4:
        raise DomainError("not an MZI mesh")
    out = []
    for k in range(0, len(c.gates), 4):
        ext, bs1, inner, bs2 = c.gates[k : k + 4]
        p = ext.position
        if (ext.kind, bs1.kind, inner.kind, bs2.kind) != ("phase", "bs", "phase", "bs") or {
            bs1.position,
            inner.position,
            bs2.position,
        } != {p}:
            raise DomainError("not an MZI mesh")
        out.append(MZIParams(p, inner.angle / 2, ext.angle))
    return out


def mesh_depth(mzis: Sequence[MZIParams], width: int) -> int:
    """Number of MZI columns after as-soon-as-possible layering."""
    busy = [0] * width
    for p in mzis:
        layer = max(busy[p.position], busy[p.position + 1]) + 1
        busy[p.position] = busy[p.position + 1] = layer
    return max(busy, default=0)


def prune_mesh(mzis: Sequence[MZIParams], phases, width: int, tol: float = 1e-12):
    """Remove MZIs in the bar state and fold their phases into the output phases.

    A bar-state MZI is ``diag(e^{i beta}, -1)``. A pending diagonal
    ``diag(a, b)`` on the inputs of a later MZI moves through it as
    ``T(alpha, beta) diag(a, b) = b T(alpha, beta + arg(a / b))``.
    """
    pending = np.ones(width, dtype=complex)
    kept: list[MZIParams] = []
    for p in mzis:
        k = p.position
        if abs(math.cos(p.alpha)) < tol:
            bar = np.diag(mzi_matrix(p.alpha, p.beta))
            pending[k] *= bar[0]
            pending[k + 1] *= bar[1]
            continue
        a, b = pending[k], pending[k + 1]
        kept.append(MZIParams(k, p.alpha, canonical_angle(p.beta + np.angle(a / b))))
        pending[k] = pending[k + 1] = b
    out = np.exp(1j * np.asarray(phases, dtype=float)) * pending
    # snap round-off around zero so diagonal inputs give exact zero phases
    angles = [canonical_angle(np.angle(x)) for x in out]
    return kept, np.array([0.0 if min(a, TWO_PI - a) < tol else a for a in angles])


def clements_decompose(U, method: str = "clements", prune: bool = True) -> tuple[Circuit, np.ndarray]:
    """Decompose a unitary into an MZI mesh followed by per-mode phases.

    Parameters
    ----------
    U : (m, m) unitary
    method : ``"clements"`` (rectangular grid, depth ``m``) or ``"reck"``
        (triangular mesh).
    prune : drop MZIs left in the bar state (see :func:`prune_mesh`), so
        that diagonal unitaries give an empty mesh.

    Returns
    -------
    circuit : Circuit
        The MZI mesh alone, without the trailing phases.
    residual_phases : ndarray of shape (m,)
        Phases to apply on each output mode after ``circuit``;
        ``with_phases(circuit, residual_phases)`` reproduces ``U``.
    """
    U = as_matrix(U, square=True)
    if not is_unitary(U, 1e-10):
        raise DomainError("clements_decompose needs a unitary matrix")
    m = U.shape[0]
    W = U.copy()
    right: list[MZIParams] = []
    left: list[MZIParams] = []

    if method == "reck":
        for row in range(m - 1, 0, -1):
            for col in range(row):
                alpha, beta = _null_right(W, row, col)
                W = W @ _embed2(mzi_matrix(alpha, beta), col, m).conj().T
                right.append(MZIParams(col, alpha, beta))
    elif method == "clements":
        for i in range(1, m):
            if i % 2:
                for j in range(i):
                    row, col = m - 1 - j, i - 1 - j
                    alpha, beta = _null_right(W, row, col)
                    W = W @ _embed2(mzi_matrix(alpha, beta), col, m).conj().T
                    right.append(MZIParams(col, alpha, beta))
            else:
                for j in range(1, i + 1):
                    row, col = m + j - i - 1, j - 1
                    alpha, beta = _null_left(W, row, col)
                    W = _embed2(mzi_matrix(alpha, beta), row - 1, m) @ W
                    left.append(MZIParams(row - 1, alpha, beta))
    else:
        raise DomainError(f"unknown mesh method {method!r}")

    # W = L_N ... L_1 U R_1^dag ... R_k^dag is diagonal. Push every L^dag
    # through the diagonal: T(a, b)^dag D = D' T(a, b') on the two modes.
    d = np.diag(W).copy()
    moved: list[MZIParams] = []
    for p in reversed(left):
        k = p.position
        d1, d2 = d[k], d[k + 1]
        phase = np.exp(-2j * p.alpha)
        d[k] = -phase * np.exp(-1j * p.beta) * d2
        d[k + 1] = -phase * d2
        moved.append(MZIParams(k, p.alpha, float(np.angle(d1 / d2))))
    mzis = right + moved
    phases = np.array([canonical_angle(np.angle(x)) for x in d])
    if prune:
        mzis, phases = prune_mesh(mzis, phases, m)
    return mesh_circuit(m, mzis), phases


def with_phases(c: Circuit, phases: Sequence[float]) -> Circuit:
    """Append a phase shifter on every mode."""
    if len(phases) != c.width:
        raise ShapeError(f"{len(phases)} phases for {c.width} modes")
    return c.add(*(Phase(phi, k) for k, phi in enumerate(phases)))


def propagate_intensity(c: Circuit, I) -> np.ndarray:
    """Output intensities ``|U|^2 I`` for an incoherent input ``I``."""
    I = np.asarray(I, dtype=float)
    if I.shape != (c.width,):
        raise ShapeError(f"intensity vector of shape {I.shape} for {c.width} modes")
    if np.any(I < 0):
        raise DomainError("intensities must be non-negative")
    return np.abs(classical_matrix(c)) ** 2 @ I
