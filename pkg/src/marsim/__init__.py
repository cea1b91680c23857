"""Discrete-event simulator for mobility-aware routing in robotic ad-hoc networks."""

from .config import ConfigError, ScenarioConfig, load_config, parse_config
from .sim import Network, RunStats, run_scenario

__version__ = "0.1.0"
