"""Circuit synthesis and resource estimates for Heisenberg-chain simulation."""

import json

from . import _core
from ._core import (
    KOverflow,
    PlaceholderAngles,
    count_gates,
    hamiltonian,
    optimize,
    pf_segments,
    qsp_full_M,
    qsp_qubits,
    qsp_segments,
    qsp_success_lb,
    synth,
    t_estimate,
    ts_params,
)

__version__ = _core.__version__


def estimate(algorithm, n, **options):
    """Resource report as a dict; keyword options mirror the CLI flags."""
    seeds = options.pop("seeds", [1])
    if isinstance(seeds, int):
        seeds = list(range(1, seeds + 1))
    return json.loads(_core.estimate_json(algorithm, n, seeds=list(seeds), **options))


def sweep(spec):
    """Run a sweep spec (dict or JSON text) and return the rows."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return json.loads(_core.sweep_json(text))["rows"]


__all__ = [
    "KOverflow",
    "PlaceholderAngles",
    "count_gates",
    "estimate",
    "hamiltonian",
    "optimize",
    "pf_segments",
    "qsp_full_M",
    "qsp_qubits",
    "qsp_segments",
    "qsp_success_lb",
    "sweep",
    "synth",
    "t_estimate",
    "ts_params",
]
