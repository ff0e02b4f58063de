from .config import config
from .errors import LabError

__all__ = ['config', 'LabError']
