"""Coordinate-descent phase retrieval.

Signals are complex numpy vectors; an ``Ensemble`` holds the sampling
vectors as the rows of an M x N matrix together with the intensities b.
"""

from ._cdpr import (
    TEST_CHANNEL,
    Ensemble,
    SpecError,
    default_spec,
    equalize,
    fost,
    gen_qpsk,
    gradient,
    isi,
    l1_objective,
    l1_solve,
    make_instance,
    minimize_quartic,
    objective,
    relative_error,
    run_experiment,
    solve,
    solve_cubic,
    spectral_init,
    wirtinger_flow,
)

SUCCESS_THRESHOLD = 1e-5

__all__ = [
    "TEST_CHANNEL",
    "Ensemble",
    "SpecError",
    "SUCCESS_THRESHOLD",
    "default_spec",
    "equalize",
    "fost",
    "gen_qpsk",
    "gradient",
    "isi",
    "l1_objective",
    "l1_solve",
    "make_instance",
    "minimize_quartic",
    "objective",
    "relative_error",
    "run_experiment",
    "solve",
    "solve_cubic",
    "spectral_init",
    "wirtinger_flow",
]
