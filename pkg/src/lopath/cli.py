"""Command-line front end.

Subcommands: ``eval``, ``dist``, ``decompose``, ``compile-zx``,
``verify-zx`` and ``export-dot``. Output is JSON with sorted keys and
numbers rounded to 12 significant digits (DOT for ``export-dot``).
Exit codes: 0 success, 2 input error, 3 size limit.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from typing import Sequence

import numpy as np

from lopath import fock, path, qpath, zx
from lopath.circuits import Circuit, classical_matrix, clements_decompose, with_phases
from lopath.errors import LopathError, SizeLimitError
from lopath.sampling import haar_unitary

EXIT_INPUT = 2
EXIT_SIZE = 3

#: Size guards applied before any computation.
MAX_PHOTONS = 16
MAX_FOCK_DIM = fock.TENSOR_LIMIT
MAX_OUTCOMES = 10**5
MAX_VERIFY_QUBITS = 6


class InputError(LopathError):
    pass


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") + 0.0
    if isinstance(obj, complex):
        return {"re": _round(obj.real), "im": _round(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2)


def _load(path_: str):
    try:
        with open(path_) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise InputError(f"cannot read {path_}: {err}") from err


def _occupation(text: str | None, width: int, name: str) -> tuple[int, ...]:
    if text is None:
        raise InputError(f"--{name} is required")
    try:
        occ = tuple(int(x) for x in text.split(",")) if text.strip() else ()
    except ValueError as err:
        raise InputError(f"--{name} must be comma-separated integers") from err
    if len(occ) != width or any(x < 0 for x in occ):
        raise InputError(f"--{name} needs {width} non-negative counts, got {text!r}")
    return occ


def _circuit(data) -> Circuit:
    if not isinstance(data, dict):
        raise InputError("circuit JSON must be an object")
    return Circuit.from_json(data)


def _matrix(data) -> np.ndarray:
    """Accept ``{"re": rows, "im": rows}``, rows of ``[re, im]`` pairs or plain rows."""
    if isinstance(data, dict) and "unitary" in data:
        data = data["unitary"]
    try:
        if isinstance(data, dict):
            M = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data.get("im", 0.0), dtype=float)
        else:
            arr = np.asarray(data, dtype=float)
            M = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 3 else arr.astype(complex)
    except (KeyError, TypeError, ValueError) as err:
        raise InputError(f"malformed matrix: {err}") from err
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    return M


def _key(occ) -> str:
    return ",".join(str(x) for x in occ)


# -- commands ----------------------------------------------------------------


def cmd_eval(args) -> dict:
    c = _circuit(_load(args.circuit))
    I = _occupation(args.inp, c.width, "in")
    J = _occupation(args.out, c.width, "out")
    n = sum(I)
    if n > MAX_PHOTONS:
        raise SizeLimitError(f"{n} photons exceed the limit of {MAX_PHOTONS}")
    backends = ["permanent", "fock", "qpath"] if args.backend == "all" else [args.backend]
    if "fock" in backends and c.width**n > MAX_FOCK_DIM:
        raise SizeLimitError(f"fock backend needs {c.width}^{n} > {MAX_FOCK_DIM} amplitudes")
    U = classical_matrix(c)
    amps = {}
    for b in backends:
        if b == "permanent":
            amps[b] = fock.amplitude_permanent(U, I, J)
        elif b == "fock":
            amps[b] = fock.amplitude_fock(U, I, J)
        else:
            amps[b] = qpath.eval_closed(qpath.event_diagram(c, I, J))
    out = {"input": list(I), "output": list(J)}
    if args.backend == "all":
        out["backends"] = {b: {"amplitude": a, "probability": abs(a) ** 2} for b, a in amps.items()}
        out["max_deviation"] = max(abs(a - b) for a, b in itertools.combinations(amps.values(), 2))
    else:
        a = amps[args.backend]
        out.update(backend=args.backend, amplitude=a, probability=abs(a) ** 2)
    return out


def cmd_dist(args) -> dict:
    c = _circuit(_load(args.circuit))
    I = _occupation(args.inp, c.width, "in")
    n = sum(I)
    if n > MAX_PHOTONS or fock.basis_size(c.width, n) > MAX_OUTCOMES:
        raise SizeLimitError(f"{fock.basis_size(c.width, n)} outcomes exceed the limit")
    dist = fock.output_distribution(c, I)
    return {"input": list(I), "distribution": {_key(J): p for J, p in dist.items()}, "total": sum(dist.values())}


def cmd_decompose(args) -> dict:
    if args.random is not None:
        U = haar_unitary(args.random, args.seed)
    elif args.unitary is not None:
        U = _matrix(_load(args.unitary))
    else:
        raise InputError("give a unitary file or --random M")
    circuit, phases = clements_decompose(U, method=args.method)
    full = with_phases(circuit, phases)
    err = float(np.max(np.abs(classical_matrix(full) - U), initial=0.0))
    return {
        "method": args.method,
        "circuit": full.to_json(),
        "mzi_count": len(circuit.gates) // 4,
        "residual_phases": list(phases),
        "depth": full.depth,
        "reconstruction_error": err,
    }


def _zx(args):
    d = zx.zx_from_json(_load(args.zx))
    if max(d.dom, d.cod) > zx.QUBIT_LIMIT:
        raise SizeLimitError(f"ZX diagrams limited to {zx.QUBIT_LIMIT} qubits")
    return d


def _describe(d) -> dict:
    kinds = sorted({node.kind for node in d.nodes})
    return {
        "modes_in": d.dom,
        "modes_out": d.cod,
        "counts": {k: d.count(k) for k in kinds},
        "photons_created": qpath.created_photons(d),
        "photons_detected": sum(node.param for node in d.nodes if node.kind == "annihilate"),
        "diagram": path.diagram_to_json(d),
    }


def cmd_compile_zx(args) -> dict:
    return _describe(zx.compile_zx(_zx(args)))


def cmd_verify_zx(args) -> dict:
    d = _zx(args)
    if max(d.dom, d.cod) > MAX_VERIFY_QUBITS:
        raise SizeLimitError(f"verification limited to {MAX_VERIFY_QUBITS} qubits")
    compiled = zx.compile_zx(d)
    report = zx.verify_encoding(d, compiled)
    out = _describe(compiled)
    del out["diagram"]
    out["report"] = report.to_json()
    out["passed"] = report.passed()
    return out


def _diagram_of(data, args):
    """Circuits (optionally closed by --in/--out), event requests or diagrams."""
    if isinstance(data, dict) and "circuit" in data:
        c = _circuit(data["circuit"])
        return qpath.event_diagram(c, _occupation(_key(data["input"]), c.width, "in"), _occupation(_key(data["output"]), c.width, "out"))
    if isinstance(data, dict) and "width" in data:
        c = _circuit(data)
        if args.inp is None and args.out is None:
            return path.lo_to_path(c)
        return qpath.event_diagram(c, _occupation(args.inp, c.width, "in"), _occupation(args.out, c.width, "out"))
    if isinstance(data, dict) and "nodes" in data:
        return path.diagram_from_json(data)
    raise InputError("expected a circuit, an event request or a diagram")


def cmd_export_dot(args) -> str:
    d = _diagram_of(_load(args.file), args)
    if args.stage == "raw":
        return path.diagram_to_dot(d)
    nf = path.rewrite(d)
    if d.dom == 0 and d.cod == 0:
        return qpath.NormalizedGraph(nf.graph, nf.factor).to_dot()
    return path.graph_to_dot(nf.graph)


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lopath", description="Linear optics, Path diagrams and dual-rail ZX.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised inputs")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="amplitude of one event")
    e.add_argument("circuit")
    e.add_argument("--in", dest="inp", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--backend", choices=["permanent", "fock", "qpath", "all"], default="permanent")
    e.set_defaults(fn=cmd_eval)

    d = sub.add_parser("dist", help="output distribution for an input occupation")
    d.add_argument("circuit")
    d.add_argument("--in", dest="inp", required=True)
    d.set_defaults(fn=cmd_dist)

    k = sub.add_parser("decompose", help="MZI mesh for a unitary")
    k.add_argument("unitary", nargs="?")
    k.add_argument("--method", choices=["clements", "reck"], default="clements")
    k.add_argument("--random", type=int, metavar="M", help="decompose a Haar-random M x M unitary")
    k.set_defaults(fn=cmd_decompose)

    c = sub.add_parser("compile-zx", help="dual-rail QPath diagram of a ZX diagram")
    c.add_argument("zx")
    c.set_defaults(fn=cmd_compile_zx)

    v = sub.add_parser("verify-zx", help="compile and compare against the qubit semantics")
    v.add_argument("zx")
    v.set_defaults(fn=cmd_verify_zx)

    x = sub.add_parser("export-dot", help="DOT text of a diagram or its normal form")
    x.add_argument("file")
    x.add_argument("--stage", choices=["raw", "normal"], default="raw")
    x.add_argument("--in", dest="inp")
    x.add_argument("--out")
    x.set_defaults(fn=cmd_export_dot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.fn(args)
    except SizeLimitError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SIZE
    except (LopathError, ValueError, KeyError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(result if isinstance(result, str) else dumps(result) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
