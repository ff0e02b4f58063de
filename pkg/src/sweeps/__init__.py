from .sweep_config import SweepConfig
from .runner import run_sweep

__all__ = ['SweepConfig', 'run_sweep']
