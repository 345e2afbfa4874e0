"""
Configuration for hypersym
GWL-1 refinement, symmetry finding and hyperedge augmentation toolkit
"""

from typing import Any, Dict, Optional
from dataclasses import dataclass, asdict, fields
import logging
import os

import hypersym_utility as utility

logger = logging.getLogger(__name__)

# ----------------- Refinement Settings -----------------

# Number of GWL-1 iterations used by the symmetry finder when none is given
DEFAULT_ITERATIONS = 2
# Skip components whose degree multiset matches an existing hyperedge
GUARD_ENABLED = True

# ----------------- Oracle Settings -----------------

# Largest vertex count for brute-force Sym(V) enumeration (8! = 40320)
AUTOMORPHISM_CAP = 8
DUALITY_RANDOM_CASES = 200
DUALITY_MAX_ITERATION = 3

# ----------------- Augmentation Settings -----------------

# Largest number of Bernoulli variables enumerated exactly (2^20 outcomes)
ENUMERATION_LIMIT = 20
MONTE_CARLO_SAMPLES = 100000
MONTE_CARLO_CHUNK = 4096
UNBIASED_TOLERANCE = 1e-9
UNBIASED_MAX_SWEEPS = 50

# ----------------- Data Settings -----------------

TRAIN_PCT = 0.80
VAL_PCT = 0.85
TARGET_SIZE = 3
NEGATIVE_RATIO = 1.0
REJECTION_FACTOR = 100
EXACT_NEGATIVE_LIMIT = 10 ** 6

# ----------------- Runtime Settings -----------------

DEFAULT_SEED = 0
THREADS = int(os.environ.get("HYPERSYM_THREADS", "1") or 1)
LOG_LEVEL = "WARNING"

# ----------------- Configuration Loading -----------------

@dataclass
class HypersymConfig:
    """Configuration class for hypersym runs"""
    default_iterations: int
    guard_enabled: bool
    automorphism_cap: int
    duality_random_cases: int
    duality_max_iteration: int
    enumeration_limit: int
    monte_carlo_samples: int
    monte_carlo_chunk: int
    unbiased_tolerance: float
    unbiased_max_sweeps: int
    train_pct: float
    val_pct: float
    target_size: int
    negative_ratio: float
    rejection_factor: int
    exact_negative_limit: int
    default_seed: int
    threads: int
    log_level: str


def default_config() -> HypersymConfig:
    """Build the configuration from the module-level defaults"""
    return HypersymConfig(
        default_iterations=DEFAULT_ITERATIONS,
        guard_enabled=GUARD_ENABLED,
        automorphism_cap=AUTOMORPHISM_CAP,
        duality_random_cases=DUALITY_RANDOM_CASES,
        duality_max_iteration=DUALITY_MAX_ITERATION,
        enumeration_limit=ENUMERATION_LIMIT,
        monte_carlo_samples=MONTE_CARLO_SAMPLES,
        monte_carlo_chunk=MONTE_CARLO_CHUNK,
        unbiased_tolerance=UNBIASED_TOLERANCE,
        unbiased_max_sweeps=UNBIASED_MAX_SWEEPS,
        train_pct=TRAIN_PCT,
        val_pct=VAL_PCT,
        target_size=TARGET_SIZE,
        negative_ratio=NEGATIVE_RATIO,
        rejection_factor=REJECTION_FACTOR,
        exact_negative_limit=EXACT_NEGATIVE_LIMIT,
        default_seed=DEFAULT_SEED,
        threads=THREADS,
        log_level=LOG_LEVEL,
    )


def load_config_from_yaml(config_path: Optional[str] = None) -> HypersymConfig:
    """Load configuration from YAML file or use defaults

    Keys present in the file override the defaults; unknown keys are
    ignored. A missing or unreadable file yields the defaults.
    """
    defaults = default_config()
    if not config_path:
        return defaults

    yaml_config = utility.load_yaml_config(config_path)
    if yaml_config is None:
        return defaults
    if not isinstance(yaml_config, dict):
        logger.warning(f"Ignoring configuration {config_path}: top level is not a mapping")
        return defaults

    known = {f.name for f in fields(HypersymConfig)}
    unknown = sorted(set(yaml_config) - known)
    if unknown:
        logger.warning(f"Ignoring unknown configuration keys: {unknown}")

    merged: Dict[str, Any] = utility.merge_dictionaries(
        asdict(defaults), {k: v for k, v in yaml_config.items() if k in known}
    )
    return HypersymConfig(**merged)


# Global configuration instance
config = load_config_from_yaml(os.environ.get("HYPERSYM_CONFIG"))
