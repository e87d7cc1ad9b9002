"""Python front end for the adcs simulator.

Numbers that the core keeps exact (rationals, potentials) cross the boundary
as strings; parse them with ``fractions.Fraction`` when needed.
"""

import json
from fractions import Fraction

from . import _core
from ._core import (
    ConfigError,
    Error,
    InfeasibleParameterError,
    broadcast_rounds,
    conductance,
    isoperimetric_number,
    mult_params,
    rmc_params,
    share_matrix,
    truncate_share,
)

EXIT_CODES = {
    0: "ok",
    1: "protocol_failure",
    2: "config_error",
    3: "infeasible",
    4: "round_cap",
    5: "congestion",
}


class RunResult:
    def __init__(self, summary, code, diagnostic):
        self.summary = summary
        self.code = code
        self.diagnostic = diagnostic

    @property
    def ok(self):
        return self.code == 0

    @property
    def status(self):
        return EXIT_CODES.get(self.code, str(self.code))

    def __repr__(self):
        return f"RunResult(status={self.status!r}, rounds={self.summary.get('rounds')})"


def run(config=None, **overrides):
    """Run one experiment. Keys match the CLI's JSON config."""
    cfg = dict(config or {})
    cfg.update(overrides)
    text, code, diagnostic = _core.run_json(json.dumps(cfg))
    return RunResult(json.loads(text) if text != "null" else {}, code, diagnostic)


def sweep(spec):
    text, code = _core.sweep_json(json.dumps(spec))
    return json.loads(text), code


def fraction(s):
    return Fraction(s)


__all__ = [
    "ConfigError",
    "Error",
    "InfeasibleParameterError",
    "RunResult",
    "broadcast_rounds",
    "conductance",
    "fraction",
    "isoperimetric_number",
    "mult_params",
    "rmc_params",
    "run",
    "share_matrix",
    "sweep",
    "truncate_share",
]
