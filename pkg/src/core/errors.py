class LabError(Exception):
    """
    Base class for every error raised by the trapping lab
    """


class GridError(LabError):
    """
    Invalid grid construction or a GridFunction that does not match its grid
    """


class SupportError(LabError):
    """
    Compact-support or causal-boundary requirement violated
    """
    def __init__(self, message, radius=None, limit=None):
        super().__init__(message)
        self.radius = radius
        self.limit = limit


class StabilityError(LabError):
    """
    Time step outside the leapfrog stability contract
    """
    def __init__(self, message, cfl=None):
        super().__init__(message)
        self.cfl = cfl


class ParameterError(LabError):
    """
    Parameters outside a preset's or a lemma's admissible range
    """


class UndefinedRatioError(LabError):
    """
    Ratio with a vanishing denominator
    """


class NearResonanceError(LabError):
    """
    Tridiagonal solve with a pivot below tolerance

    Carries the (lambda, tau) point so sweeps can record it and move on.
    """
    def __init__(self, lam, tau, pivot, scale):
        super().__init__(
            f"Near-resonant system at lambda={lam:g}, tau={complex(tau):g}: "
            f"|pivot|={pivot:.3e} below tolerance (scale {scale:.3e})"
        )
        self.lam = lam
        self.tau = tau
        self.pivot = pivot
        self.scale = scale


class WKBRegionError(LabError):
    """
    WKB functional evaluated at nodes outside its validity region
    """
    def __init__(self, variant, nodes):
        shown = ", ".join(str(int(i)) for i in list(nodes)[:10])
        more = "" if len(nodes) <= 10 else f" (+{len(nodes) - 10} more)"
        super().__init__(f"Variant {variant} evaluated outside its region at nodes {shown}{more}")
        self.variant = variant
        self.nodes = list(nodes)


class FitError(LabError):
    """
    Log-log fit requested on unusable data
    """


class ConfigError(LabError):
    """
    Invalid sweep configuration
    """


class ReportError(LabError):
    """
    Report could not be written or read back
    """
