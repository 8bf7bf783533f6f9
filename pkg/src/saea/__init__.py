"""Self-adjusting (1+1) evolutionary algorithms on LeadingOnes.

Simulation of the success-based multiplicative rate rule (plain and
resampling mutation), numerical evaluation of the matching expected-runtime
bounds, fixed-target analysis, and a reproducible Monte Carlo harness.
"""

from .algorithms import (AlgoState, AlgorithmSpec, ControlConfig, KOpt,
                         MutationModel, OneBit, RateSchedule, RunResult,
                         SelfAdjusting, StaticRate, default_control,
                         run_to_optimum, step)
from .core import leading_ones, make_rng
from .experiment import (AggregateStats, Campaign, CampaignResult,
                         rate_tracking_report, run_campaign)
from .theory import (LevelSchedule, TheoryCurve, crossing_point,
                     expected_runtime, fixed_target_curve,
                     fixed_target_expected, normalized_selfadj_ea,
                     sweep_success_ratio)

__version__ = "0.1.0"
