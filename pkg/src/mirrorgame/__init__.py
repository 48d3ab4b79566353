"""Virtual-player engine for the one-dimensional mirror game.

A feedback-controlled HKB oscillator end-effector that follows or leads a
partner in real time, with signature (velocity-distribution) matching,
coordination metrics, baseline models and a live-play WebSocket service.
"""

from .dynamics import (
    HkbParams,
    HkbState,
    CoupledHkbState,
    LinearParams,
    LimitCycleRegion,
    DivergenceError,
    NoLimitCycleError,
    hkb_derivative,
    hkb_step,
    coupled_hkb_step,
    limit_cycle_region,
    linear_step,
    linear_exact_step,
    orbit_energy,
)
from .perception import (
    FilterState,
    ReferenceSample,
    PerceptionPipeline,
    low_pass,
    estimate_velocity,
    predict_position,
)
from .adaptive import (
    AdaptiveConfig,
    AdaptiveGains,
    EnergyDiagnostics,
    AfcController,
    afc_control,
    update_gains,
    energy,
    tracking_bound,
    epsilon_bound,
    check_eta_condition,
)
from .optimal import (
    OptimalWeights,
    CollocationSolution,
    ErrorBounds,
    SingularSystemError,
    build_collocation_system,
    solve_collocation,
    opc_step,
    cost_functional,
    one_step_error_bounds,
    perturbation_check,
    mode_preset,
)
from .signature import (
    Signature,
    SignatureTrack,
    velocity_pdf,
    emd,
    playback,
)
from .metrics import (
    Trace,
    MetricsReport,
    rms,
    rpe,
    circular_variance,
    time_lag,
    relative_phase,
    compute_report,
)
from .baselines import (
    RpcState,
    RpcParams,
    rpc_step,
    hkb_fixed_follower_step,
)
from .session import (
    SessionConfig,
    SessionLog,
    run_session,
    run_vp_vs_vp,
    compare_models,
    synthetic_benchmark,
)

__version__ = "0.1.0"
