"""Multi-user mmWave video-streaming cell simulator and scheduler library."""
from .beam import overhead
from .config import (BanditParams, BeamModelParams, ChannelParams, DEFAULT, ExperimentConfig,
                     QoEParams, ResolutionClass, TABLE1_CLASSES, build_population,
                     feasibility_report, preset, validate)
from .dynamics import draw_success, step_buffer, step_estimate, transmitted_seconds
from .engine import RunTrace, run_episode, run_experiment
from .qoe import classify_region, qoe, qoe_values
from .schedulers import (b2p_select, b2p_update, oracle_select, greedy_select, rr_select,
                         trend, ucb_bonus)

__version__ = "0.1.0"
