"""Built-in instance library: regression anchors committed as data files."""

from __future__ import annotations

from importlib import resources

from .instancefile import load_instance
from .structures import StructureInstance

BUILTIN_NAMES = (
    "trivial",
    "complex-r2",
    "symplectic-r2",
    "holomorphic-poisson-r4",
    "locally-product-r5",
    "perturbed-holomorphic-r6",
    "cosymplectic-r5",
    "sasakian-r3",
    "nonnormal-contact-r3",
    "example41-r5",
    "so3-r3",
    "zero-pi-r3",
    "quadratic-pi-r3",
    "nxnprime-r7",
)


def builtin_path(name: str):
    if name not in BUILTIN_NAMES:
        raise KeyError(f"no built-in instance {name!r}")
    return resources.files("crfkit.instances") / f"{name}.json"


def load_builtin(name: str) -> StructureInstance:
    with resources.as_file(builtin_path(name)) as path:
        return load_instance(path)


def all_builtins() -> list[StructureInstance]:
    return [load_builtin(name) for name in BUILTIN_NAMES]
