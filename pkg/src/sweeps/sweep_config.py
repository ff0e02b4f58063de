import os
import copy
import logging

from core.config import config, Config
from core.errors import ConfigError
from utils.sampling import log_spaced, quantized_lambdas

logger = logging.getLogger("sweep_config")

EXPERIMENT_KINDS = ("resolvent", "quasimode", "saturation", "ibp-check", "hardy-check", "quadrature-lemmas")
HIGH_FREQUENCY_KINDS = ("quasimode", "saturation", "quadrature-lemmas")

# lambda grids used when a document omits lambda_grid
DEFAULT_LAMBDA_GRIDS = {
    "resolvent": {"min": 32.0, "max": 2048.0, "points_per_decade": 4},
    "quasimode": {"min": 64.0, "max": 4096.0, "points_per_decade": 2},
    "saturation": {"values": [64.0, 128.0, 256.0, 512.0, 1024.0]},
    "ibp-check": {"values": [1.0]},
    "hardy-check": {"values": [1.0]},
    "quadrature-lemmas": {"values": [1e3, 1e4, 1e5]},
}

FIELDS = ("experiment_kind", "m", "lambda_grid", "eps_grid", "eps_t", "delta", "grid_policy",
          "output_paths", "seed", "tolerances", "fit_upper_half", "options")


class SweepConfig:
    """
    Validated sweep configuration

    Fields mirror the JSON document; anything missing falls back to the
    versioned defaults in config/lab.toml.
    """
    def __init__(self, document):
        if not isinstance(document, dict):
            raise ConfigError("Sweep configuration must be a JSON object")
        unknown = sorted(set(document) - set(FIELDS))
        if unknown:
            raise ConfigError(f"Unknown configuration fields: {', '.join(unknown)}")

        self.experiment_kind = document.get("experiment_kind")
        if self.experiment_kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"experiment_kind must be one of {EXPERIMENT_KINDS}, got {self.experiment_kind!r}")

        self.m = self._parse_m(document.get("m", config.get('sweep_defaults.m', self.experiment_kind, [2])))
        self.lambda_grid = dict(document.get("lambda_grid", DEFAULT_LAMBDA_GRIDS[self.experiment_kind]))
        self.eps_grid = {**config.section('resolvent.eps_grid'), **document.get("eps_grid", {})}
        self.eps_t = float(document.get("eps_t", config.get('saturation', 'eps_t', 0.25)))
        self.delta = float(document.get("delta", config.get('resolvent', 'delta', 0.1)))
        self.grid_policy = {**config.section('grid'), **document.get("grid_policy", {})}
        self.output_paths = {"dir": config.output_dir, "basename": self.experiment_kind.replace("-", "_"),
                             **document.get("output_paths", {})}
        self.seed = int(document.get("seed", 0))
        self.tolerances = {**config.section('tolerances'), **document.get("tolerances", {})}
        self.fit_upper_half = bool(document.get("fit_upper_half", config.get('fit', 'upper_half', True)))
        self.options = dict(document.get("options", {}))

        self.lambdas = self._expand_lambdas()
        self._validate()

    @staticmethod
    def _parse_m(values):
        if isinstance(values, int) and not isinstance(values, bool):
            values = [values]
        if not isinstance(values, list) or not values:
            raise ConfigError("m must be a nonempty list of positive integers")
        for m in values:
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise ConfigError(f"m entries must be positive integers, got {m!r}")
        return sorted(set(values))

    def _expand_lambdas(self):
        grid = self.lambda_grid
        if "values" in grid:
            values = [float(v) for v in grid["values"]]
        else:
            try:
                values = list(log_spaced(float(grid["min"]), float(grid["max"]),
                                         float(grid.get("points_per_decade", 4))))
            except KeyError as e:
                raise ConfigError(f"lambda_grid needs 'values' or 'min'/'max', missing {e}")
        if not values:
            raise ConfigError("lambda_grid is empty")
        if self.options.get("quantized"):
            values = list(quantized_lambdas(values))
        return sorted(float(v) for v in values)

    def _validate(self):
        if any(lam < 0 for lam in self.lambdas):
            raise ConfigError("lambda values must be nonnegative")
        if self.experiment_kind in HIGH_FREQUENCY_KINDS and self.lambdas[0] < 1:
            raise ConfigError(f"{self.experiment_kind} needs lambda >= 1, got {self.lambdas[0]:g}")
        if self.eps_t <= 0:
            raise ConfigError(f"eps_t must be positive, got {self.eps_t}")
        if self.delta <= 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.grid_policy.get("cfl", 0.9) > 0.9:
            raise ConfigError(f"grid_policy.cfl must not exceed 0.9, got {self.grid_policy['cfl']}")
        if int(self.eps_grid.get("coarse_points", 1)) < 1 or int(self.eps_grid.get("fine_points", 1)) < 1:
            raise ConfigError("eps_grid point counts must be positive")

    def tolerance(self, name, default=None):
        return self.tolerances.get(name, default)

    def as_dict(self):
        """
        Echo of the effective configuration, used verbatim in reports
        """
        return copy.deepcopy({
            "experiment_kind": self.experiment_kind,
            "m": self.m,
            "lambda_grid": self.lambda_grid,
            "eps_grid": self.eps_grid,
            "eps_t": self.eps_t,
            "delta": self.delta,
            "grid_policy": self.grid_policy,
            "output_paths": self.output_paths,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "fit_upper_half": self.fit_upper_half,
            "options": self.options,
        })

    @classmethod
    def from_file(cls, file_path):
        """
        Load a SweepConfig from a JSON document
        """
        if not os.path.exists(file_path):
            raise ConfigError(f"Configuration file not found: {file_path}")
        try:
            document = Config.load_json(file_path)
        except ValueError as e:
            raise ConfigError(f"Invalid JSON in {file_path}: {e}")
        return cls(document)
