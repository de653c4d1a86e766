"""Evolutionary-game and opinion-dissemination models of cyberviolence governance.

Two model families live side by side:

* a four-party evolutionary game (victim, perpetrator, media, government)
  with replicator dynamics and Jacobian-based stability of the 16 pure
  strategy profiles (:mod:`covigov.game`, :mod:`covigov.equilibria`,
  :mod:`covigov.dynamics`);
* an SBI1I2R opinion-dissemination model, both as an ODE system
  (:mod:`covigov.opinion`) and as an agent-based simulation on a
  preferential-attachment network (:mod:`covigov.abm`).

:mod:`covigov.config`, :mod:`covigov.runner` and :mod:`covigov.cli` wire
them into reproducible, file-producing experiments.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ArtifactIOError,
    ConfigError,
    CovigovError,
    InvalidConfig,
    InvalidStep,
    MalformedPlan,
    NoConvergence,
    NumericError,
    OutOfRange,
    ParseError,
    ValidationError,
    ZeroDenominator,
)
from .game import (  # noqa: E402
    LETTERS,
    ExpectedPayoffs,
    GameParams,
    PureProfile,
    StrategyState,
    expected_payoffs,
    payoff_advantages,
    replicator_jacobian,
    replicator_rhs,
    threshold_government_y0,
    threshold_media_m0,
    threshold_perpetrator_m0,
    threshold_victim_m0,
)
from .equilibria import (  # noqa: E402
    EquilibriumReport,
    PathPlan,
    Stability,
    classify_all,
    classify_point,
    enumerate_pure_points,
    ess_conditions,
    ess_set,
    validate_path,
)
from .dynamics import detect_convergence, integrate_replicator, sweep  # noqa: E402
from .opinion import (  # noqa: E402
    GROUPS,
    CompartmentState,
    OpinionParams,
    endemic_equilibrium_numeric,
    endemic_equilibrium_printed,
    integrate_opinion,
    opinion_rhs,
    r0,
    r0_spectral,
    zero_spread_equilibrium,
)
from .abm import AbmConfig, Network, generate_scale_free  # noqa: E402
from .abm import run as run_abm  # noqa: E402
from .config import ExperimentConfig, load_preset, parse_config, serialize  # noqa: E402
from .runner import emit_artifacts, run_case_plan, run_experiment  # noqa: E402
