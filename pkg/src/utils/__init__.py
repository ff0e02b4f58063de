from .sampling import log_spaced, random_bumps

__all__ = ['log_spaced', 'random_bumps']
