from .geometry import GeometryProfile
from .discretization import Grid

__all__ = ['GeometryProfile', 'Grid']
