# File: src/core/config.py
# Configuration for the Majorana phase-space toolkit

import os
import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Optional

import dotenv
import numpy as np

from .errors import ConfigParse, UnknownConfigKey, UnknownScenario

dotenv.load_dotenv()

#==============================================================
# NUMERICAL TOLERANCES
#==============================================================

ANTISYM_TOL = 1e-12          # construction tolerance for antisymmetry
RECONSTRUCTION_TOL = 1e-10   # canonical form reconstruction
CLASS_D_TOL = 1e-10          # reality / symmetry residue of class-D parameters
HERMITIAN_TOL = 1e-12        # covariance blocks and density matrices
MAX_CONDITION = 1e12         # above this a shifted matrix counts as singular
NEGATIVITY_FLOOR = -1e-12    # smallest admissible Q value

IDENTITY_TOL_SMALL = 1e-6    # identity residual, M <= 2
IDENTITY_TOL_LARGE = 1e-5    # identity residual, M = 3
DERIVATIVE_STEP = 1e-5       # default finite-difference step
DERIVATIVE_STEP_RANGE = (1e-7, 1e-3)

#==============================================================
# SIZE LIMITS
#==============================================================

MAX_MODES = 12               # dense 2^M x 2^M oracle
MAX_EXPANSION_MODES = 3      # normal-ordered series expansion
MAX_IDENTITY_MODES = 3       # operator-matrix identities
MAX_LIOUVILLE_MODES = 4      # dense Liouvillian exponentiation
MIN_ACCEPTANCE = 1e-4        # rejection sampler stall threshold

#==============================================================
# DEFAULTS
#==============================================================

DEFAULT_K = 1.0              # scaling exponent used for dynamics
DEFAULT_SEED = 12345
DEFAULT_CHUNK_SIZE = 4096    # samples / trajectories per generator chunk
PDE_CFL = 0.4
BOSONIC_DT = 1e-3            # RK4 step of the bosonic commutator flow
GAUSS_LEGENDRE_NODES = 64
SCHEMA_VERSION = 1

#==============================================================
# DIRECTORIES AND ENVIRONMENT
#==============================================================

BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
OUTPUT_DIR = os.getenv('MAJORANA_OUTPUT_DIR', os.path.join(BASE_DIR, "output"))
DEFAULT_THREADS = int(os.getenv('MAJORANA_THREADS', '1'))

SCENARIOS = (
    "verify-identities",
    "resolution",
    "qfunc",
    "evolve-unitary",
    "evolve-dissipative",
    "volume",
    "bosonic-compare",
)


def parse_matrix(text: str, dtype=complex) -> np.ndarray:
    """
    Parse a matrix written as rows separated by ';' and entries by ','

    Args:
        text (str): e.g. "0, 1; 1, 0" or a single number
        dtype: numpy dtype of the result

    Returns:
        np.ndarray: 2-D array (a single number gives a 1x1 array)
    """
    rows = [row.strip() for row in text.strip().split(";") if row.strip()]
    if not rows:
        raise ConfigParse("empty matrix literal", value=text)
    try:
        parsed = [[complex(entry.strip().replace(" ", "")) for entry in row.split(",")] for row in rows]
    except ValueError as exc:
        raise ConfigParse(f"bad matrix entry: {exc}", value=text) from exc
    width = len(parsed[0])
    if any(len(row) != width for row in parsed):
        raise ConfigParse("ragged matrix literal", value=text)
    result = np.array(parsed, dtype=complex)
    if np.issubdtype(np.dtype(dtype), np.floating):
        if np.max(np.abs(result.imag), initial=0.0) > 0:
            raise ConfigParse("complex entry in a real matrix", value=text)
        return result.real.astype(dtype)
    return result.astype(dtype)


def parse_vector(text: str) -> np.ndarray:
    """Parse a comma separated complex vector"""
    try:
        return np.array([complex(entry.strip().replace(" ", "")) for entry in text.split(",") if entry.strip()])
    except ValueError as exc:
        raise ConfigParse(f"bad vector entry: {exc}", value=text) from exc


@dataclass
class ScenarioConfig:
    """
    All parameters a scenario can consume

    Matrix-valued fields are kept as their text literals so the exact
    configuration can be embedded in the JSON output.
    """
    scenario: str = "verify-identities"
    modes: int = 1
    k: float = DEFAULT_K
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS
    trials: int = 20
    step: float = DERIVATIVE_STEP
    samples: int = 100000
    nodes: int = GAUSS_LEGENDRE_NODES
    h: str = "1"
    delta: str = "0"
    omega: str = "0"
    gamma: str = "1"
    n0: float = 1.0
    alpha0: str = "1"
    t_final: float = 3.0
    dt: float = 0.01
    n_traj: int = 100000
    grid: int = 400
    record_every: int = 10
    sampler: str = "importance"

    def as_dict(self) -> Dict[str, Any]:
        """Return the exact configuration as JSON-safe data"""
        return dataclasses.asdict(self)

    # Typed views of the matrix literals
    def matrix(self, name: str, dtype=complex) -> np.ndarray:
        """
        Interpret a matrix field; a single number means number * identity

        Args:
            name (str): field name (h, delta, omega, gamma)
            dtype: numpy dtype

        Returns:
            np.ndarray: modes x modes matrix
        """
        raw = parse_matrix(getattr(self, name), dtype=dtype)
        if raw.shape == (1, 1) and self.modes > 1:
            if name == "delta":
                if raw[0, 0] != 0:
                    raise ConfigParse("scalar delta must be 0 for more than one mode", value=getattr(self, name))
                return np.zeros((self.modes, self.modes), dtype=dtype)
            return raw[0, 0] * np.eye(self.modes, dtype=dtype)
        if raw.shape != (self.modes, self.modes):
            raise ConfigParse(f"{name} must be {self.modes}x{self.modes}", shape=raw.shape)
        return raw

    def alpha_vector(self) -> np.ndarray:
        vec = parse_vector(self.alpha0)
        if vec.size == 1 and self.modes > 1:
            vec = np.full(self.modes, vec[0])
        if vec.size != self.modes:
            raise ConfigParse("alpha0 length must equal modes", length=vec.size)
        return vec

    def validate(self):
        """Check the preconditions every scenario relies on"""
        if self.scenario not in SCENARIOS:
            raise UnknownScenario(f"unknown scenario {self.scenario!r}", known=SCENARIOS)
        if not 1 <= self.modes <= MAX_MODES:
            raise ConfigParse("modes out of range", modes=self.modes)
        if self.k < 0:
            raise ConfigParse("k must be nonnegative", k=self.k)
        if self.threads < 1:
            raise ConfigParse("threads must be at least 1", threads=self.threads)
        for name in ("trials", "samples", "nodes", "n_traj", "record_every"):
            if getattr(self, name) < 1:
                raise ConfigParse(f"{name} must be positive", value=getattr(self, name))
        if self.grid < 0:
            raise ConfigParse("grid must be nonnegative", grid=self.grid)
        if self.t_final < 0 or self.dt <= 0:
            raise ConfigParse("need t_final >= 0 and dt > 0", t_final=self.t_final, dt=self.dt)
        if not 0.0 <= self.n0 <= 1.0:
            raise ConfigParse("n0 must lie in [0, 1]", n0=self.n0)
        if self.sampler not in ("importance", "rejection"):
            raise ConfigParse("sampler must be importance or rejection", sampler=self.sampler)
        for name in ("h", "delta", "omega", "gamma"):
            self.matrix(name)
        self.alpha_vector()
        return self


CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _normalize_key(key: str) -> str:
    return key.strip().replace("-", "_")


def _coerce(name: str, raw: Any) -> Any:
    kind = CONFIG_FIELDS[name].type
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind in (int, "int"):
            return int(float(text)) if "e" in text.lower() else int(text)
        if kind in (float, "float"):
            return float(text)
    except ValueError as exc:
        raise ConfigParse(f"cannot parse {name}", value=text) from exc
    return text


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a plain key = value configuration file

    Args:
        path (str): path of the file

    Returns:
        dict: typed values keyed by field name
    """
    values: Dict[str, Any] = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigParse(f"cannot read config file: {exc}", path=path) from exc

    for lineno, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigParse("expected key = value", path=path, line=lineno)
        key, raw = content.split("=", 1)
        name = _normalize_key(key)
        if name not in CONFIG_FIELDS:
            raise UnknownConfigKey(f"unknown key {key.strip()!r}", path=path, line=lineno)
        values[name] = _coerce(name, raw)
    return values


def merge_config(file_values: Optional[Dict[str, Any]] = None,
                 flag_values: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """
    Build a ScenarioConfig; flags override file values

    Args:
        file_values (dict): values from load_config_file
        flag_values (dict): values given on the command line (None entries ignored)

    Returns:
        ScenarioConfig: validated configuration
    """
    merged: Dict[str, Any] = {}
    for source in (file_values or {}, flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            name = _normalize_key(key)
            if name not in CONFIG_FIELDS:
                raise UnknownConfigKey(f"unknown key {key!r}")
            merged[name] = _coerce(name, value)
    return ScenarioConfig(**merged).validate()
