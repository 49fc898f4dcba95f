"""Python bindings for the ahilb core.

Structured results come back as plain dicts and lists. Lattices and toric
symbols use the same JSON layout as the command-line tool.
"""

import json as _json

from . import _core
from ._core import ComputationError, PreconditionError, sha256_hex

__all__ = [
    "ComputationError",
    "PreconditionError",
    "chi",
    "chi_sequence",
    "conservation",
    "deformation_blocks",
    "envelope",
    "estimate",
    "fs_gram",
    "fs_symbol",
    "h0_theta",
    "h1_theta",
    "hilbert_function",
    "isotypic",
    "run",
    "sequence_inequality",
    "sha256_hex",
]


def _hex(value):
    if isinstance(value, str) and (value.startswith(("0x", "-0x")) or value in ("inf", "-inf")):
        return float.fromhex(value) if "x" in value else float(value)
    if isinstance(value, list):
        return [_hex(v) for v in value]
    if isinstance(value, dict):
        return {k: _hex(v) for k, v in value.items()}
    return value


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def _symbol(symbol):
    return "" if symbol is None else _dump(symbol)


def hilbert_function(N, ideal=(), n_min=0, n_max=10):
    """Ranks of (S/I)_n on P^N for a coordinate ideal given by variable indices."""
    return _core.hilbert_function(N, list(ideal), n_min, n_max)


def deformation_blocks(N, ideal, n):
    return _json.loads(_core.deformation_blocks(N, list(ideal), n))


def isotypic(N, ideal, n):
    return _json.loads(_core.isotypic(N, list(ideal), n))


def fs_gram(N, n):
    """Fubini-Study Gram of degree n on P^N, entries as "p/q" strings."""
    return _json.loads(_core.fs_gram(N, n))


def chi(lattice):
    return _core.chi(_dump(lattice))


def h0_theta(lattice):
    return _core.h0_theta(_dump(lattice))


def h1_theta(lattice):
    return _core.h1_theta(_dump(lattice))


def chi_sequence(N=1, ideal=(), symbol=None, shift=0.0, n_min=0, n_max=10):
    """chi of each degree; `symbol` is None for Fubini-Study or a toric symbol dict (P^1 only)."""
    return _json.loads(_core.chi_sequence(N, list(ideal), _symbol(symbol), shift, n_min, n_max))


def estimate(N=1, ideal=(), symbol=None, shift=0.0, n_min=20, n_max=400, r=None):
    if r is None:
        r = N + 1 - (1 if ideal else 0)
    return _hex(_json.loads(_core.estimate(N, list(ideal), _symbol(symbol), shift, n_min, n_max, r)))


def conservation(N, ideal, n_min=0, n_max=8):
    return _json.loads(_core.conservation(N, list(ideal), n_min, n_max))


def fs_symbol(dim=1, T=30.0, nodes=4097):
    return _hex(_json.loads(_core.fs_symbol(dim, T, nodes)))


def envelope(symbol):
    return _hex(_json.loads(_core.envelope(_dump(symbol))))


def sequence_inequality(entries, N, eps):
    """`entries` maps multi-index tuples to values; returns (holds, slack)."""
    items = entries.items() if isinstance(entries, dict) else entries
    return _core.sequence_inequality([(list(k), float(v)) for k, v in items], N, eps)


def run(*args):
    """Runs a CLI subcommand in process; returns (exit_code, stdout, stderr)."""
    return _core.run([str(a) for a in args])
