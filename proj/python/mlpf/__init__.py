"""Python access to the mlpf optimizer core."""

from ._mlpf import (
    ConfigError,
    KdlDomainError,
    Problem,
    RunConfig,
    Trace,
    __version__,
    check,
    config_keys,
    cost_update,
    frozen_eta,
    icosahedral_spread,
    load_config,
    make_config,
    method_cells,
    parse_config,
    problem,
    problem_names,
    read_trace,
    run,
)

__all__ = [
    "ConfigError",
    "KdlDomainError",
    "Problem",
    "RunConfig",
    "Trace",
    "__version__",
    "check",
    "config_keys",
    "cost_update",
    "frozen_eta",
    "icosahedral_spread",
    "load_config",
    "make_config",
    "method_cells",
    "parse_config",
    "problem",
    "problem_names",
    "read_trace",
    "run",
]
