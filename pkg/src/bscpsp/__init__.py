"""Binomial self-compensation of motion error in phase-shifting profilometry."""

from .bsc import ibsc, oplus, pbsc, sliding_stream
from .imaging import CaptureConfig, FringeParams, MotionTrajectory, make_ramp_scene, simulate_capture
from .retrieval import WrappedPhaseMap, wrapped_phase_4step, wrapped_phase_nstep

__all__ = [
    "CaptureConfig",
    "FringeParams",
    "MotionTrajectory",
    "WrappedPhaseMap",
    "ibsc",
    "make_ramp_scene",
    "oplus",
    "pbsc",
    "simulate_capture",
    "sliding_stream",
    "wrapped_phase_4step",
    "wrapped_phase_nstep",
]
