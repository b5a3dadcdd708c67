"""The two Hankel counterexamples and a small inheritance example, as data.

Tensors are always produced by ``from_weighted_powers`` from their
Vandermonde data; the JSON files under ``structensor/data`` are generated by
:func:`write_bundled` and a test checks they are byte-identical to a fresh
generation.

* ``sec54``: ``m = 4, n = 2``; nodes 1, 1000, 1e-4 with weights 1, 1, -1e-4.
* ``sec55``: ``m = 4, n = 4``; nodes 1, 10, 20, 50, 1e-4 with weights
  1, 1, 1, 1, -1e-4.
* ``node2``: ``m = 2, n = 5`` generating vector ``h_i = 2^i`` (single node 2).
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .decomposition import GeneratingVector, VandermondeDecomposition, build_from_vandermonde, generating_from_hankel
from .jsonio import dumps, load
from .tensor import DecompositionList, SymmetricTensor

__all__ = [
    "BUNDLED_FILES",
    "bundled_path",
    "load_bundled",
    "node2_generating",
    "sec54_decomposition",
    "sec54_tensor",
    "sec55_decomposition",
    "sec55_tensor",
    "write_bundled",
]

SEC54_NODES = (1.0, 1000.0, 1e-4)
SEC54_WEIGHTS = (1.0, 1.0, -1e-4)
SEC55_NODES = (1.0, 10.0, 20.0, 50.0, 1e-4)
SEC55_WEIGHTS = (1.0, 1.0, 1.0, 1.0, -1e-4)
# diagonal preconditioning that brings the sec55 entries from ~1e20 to below 1e3
SEC55_SCALING = (1.0, 1.0 / 50, 1.0 / 2500, 1.0 / 125000)


def sec54_decomposition() -> VandermondeDecomposition:
    return VandermondeDecomposition(np.array(SEC54_NODES), np.array(SEC54_WEIGHTS), dim=2, order=4)


def sec55_decomposition() -> VandermondeDecomposition:
    return VandermondeDecomposition(np.array(SEC55_NODES), np.array(SEC55_WEIGHTS), dim=4, order=4)


def sec54_tensor() -> SymmetricTensor:
    return build_from_vandermonde(sec54_decomposition())


def sec55_tensor() -> SymmetricTensor:
    return build_from_vandermonde(sec55_decomposition())


def node2_generating() -> GeneratingVector:
    return GeneratingVector(2.0 ** np.arange(9), order=2, dim=5)


def _payloads() -> dict[str, dict]:
    def dec_payload(v: VandermondeDecomposition) -> dict:
        d: DecompositionList = v.as_decomposition_list()
        return d.to_dict()

    return {
        "sec54_tensor.json": sec54_tensor().to_dict(),
        "sec54_generating.json": generating_from_hankel(sec54_tensor()).to_dict(),
        "sec54_decomposition.json": dec_payload(sec54_decomposition()),
        "sec55_tensor.json": sec55_tensor().to_dict(),
        "sec55_generating.json": generating_from_hankel(sec55_tensor()).to_dict(),
        "sec55_decomposition.json": dec_payload(sec55_decomposition()),
        "node2_generating.json": node2_generating().to_dict(),
    }


BUNDLED_FILES = tuple(sorted(_payloads()))


def render_bundled() -> dict[str, str]:
    """File name -> exact file contents."""
    return {name: dumps(payload) for name, payload in _payloads().items()}


def write_bundled(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in render_bundled().items():
        path = directory / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def bundled_path(name: str) -> Path:
    if not name.endswith(".json"):
        name += ".json"
    if name not in BUNDLED_FILES:
        raise KeyError(f"no bundled file '{name}'; available: {', '.join(BUNDLED_FILES)}")
    return Path(str(resources.files("structensor") / "data" / name))


def load_bundled(name: str) -> dict:
    return load(bundled_path(name))


if __name__ == "__main__":  # regenerate the shipped data files
    for p in write_bundled(Path(__file__).with_name("data")):
        print(p)
