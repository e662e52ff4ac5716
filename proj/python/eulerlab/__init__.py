"""Numerical laboratory for the complete and isentropic Euler systems."""

import json as _json

from ._core import (  # noqa: F401
    ArgumentError,
    DomainError,
    RangeError,
    ResolutionError,
    SolverAbort,
    __version__,
    chain_commutator_rate,
    cli,
    entropy,
    estimate_coercivity,
    fan_field,
    fit_regularity,
    gibbs_residual,
    lp_norm,
    mollify,
    oslip,
    pressure,
    relative_entropy,
    riemann_exact,
    run_criterion,
    seminorm,
    theta_of,
    tilde_pressure,
    weierstrass,
)
from ._core import simulate as _simulate


def simulate(config=None, **overrides):
    """Run the finite-volume solver.

    ``config`` is a dict in the same schema as the ``simulate --config`` file;
    keyword arguments override top-level keys.
    """
    cfg = dict(config or {})
    cfg.update(overrides)
    return _simulate(_json.dumps(cfg))
