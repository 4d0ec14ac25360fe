"""Random invariant tori for quasi-periodically forced Langevin systems.

Thin Python layer over the C++ core: model setup, pathwise noise, the RDE
flow, the deterministic torus solve, the noise expansion, and the
statistics drivers.
"""

from ._ritor import (  # noqa: F401
    AdaptedFrame,
    BlowupError,
    CertificationError,
    DeterministicTorus,
    EnsembleSummary,
    Expansion,
    FlowOptions,
    FourierTorus,
    LyapunovReport,
    ModelParams,
    Moments,
    NoiseRealization,
    SolverOptions,
    TorusGrid,
    __version__,
    drift,
    drift_jacobian,
    epsilon_derivatives,
    ergodic_average_test,
    exit_probability,
    forcing_E,
    hyperbolicity_margin,
    lyapunov_H,
    lyapunov_spectrum,
    mc_torus_moments,
    pullback_to_sde,
    random_transform,
    solve_k0,
    solve_reducibility,
    time_one_map,
    variational_flow,
    zero_torus,
)
