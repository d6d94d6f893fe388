"""
Run Configuration
Description: The validated description of one command-line run.

Every numeric parameter is checked against the precondition of the command it
is passed to before any work starts; a failed check is a ConfigError naming the
violated condition.
"""

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional

from ..curves.attainability import eta_in_range
from ..curves.elliptic_core import P_EXHAUSTIVE
from ..errors import ConfigError
from ..experiments.duke_construction import EPSILON_LIMIT
from ..experiments.survey import SurveyMode
from ..experiments.theorem_checks import DEFAULT_ETA, ThresholdRule
from ..number_theory.divisor_stats import DEFAULT_LAMBDA, H_CEILING, MAX_SHIFT, ZRule
from ..number_theory.prime_engine import SIEVE_CEILING

CACHE_ENV = 'JACOBIAN_WORKBENCH_CACHE'
DEFAULT_CACHE_DIR = '.workbench_cache'


class Command(Enum):
    SIEVE = 'sieve'
    HXYZ = 'hxyz'
    HXYZ_SHIFTED = 'hxyz-shifted'
    SWEEP = 'ford-sweep'
    SURVEY = 'survey'
    CENSUS = 'census'
    DUKE = 'duke'
    MERTENS = 'mertens'
    BV = 'bv'
    BOUNDS = 'bounds'
    THRESHOLD = 'thm1'
    HALF_THRESHOLD = 'thm3'


# descriptive spellings accepted on the command line
COMMAND_ALIASES = {
    'sweep': Command.SWEEP,
    'threshold': Command.THRESHOLD,
    'half-threshold': Command.HALF_THRESHOLD,
}


class OutputFormat(Enum):
    CSV = 'csv'
    JSONL = 'jsonl'


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or DEFAULT_CACHE_DIR)


@dataclass
class RunConfig:
    command: Command
    x: Optional[int] = None
    y: Optional[float] = None
    z: Optional[float] = None
    x_lo: int = 5
    x_hi: Optional[int] = None
    x_grid: List[int] = field(default_factory=list)
    epsilon: float = 0.05
    eta: float = DEFAULT_ETA
    genus: int = 1
    k_tuple: List[int] = field(default_factory=list)
    k1: Optional[int] = None
    lam: int = DEFAULT_LAMBDA
    y_list: List[float] = field(default_factory=list)
    z_rule: ZRule = ZRule.DOUBLE
    mode: SurveyMode = SurveyMode.EXHAUSTIVE
    rule: ThresholdRule = ThresholdRule.CONSTANT
    threads: int = 1
    cache_dir: Path = field(default_factory=default_cache_dir)
    format: OutputFormat = OutputFormat.CSV
    resume: bool = False
    p_exhaustive: int = P_EXHAUSTIVE
    bound_scale: float = 1.0
    realize: int = 1
    output: Optional[Path] = None
    details: bool = False
    verbose: bool = False

    @classmethod
    def from_namespace(cls, ns) -> 'RunConfig':
        """Build a config from an argparse namespace (absent flags keep defaults)."""
        values = {}
        for name in cls.__dataclass_fields__:
            value = getattr(ns, name, None)
            if value is not None:
                values[name] = value
        config = cls(**values)
        config.command = COMMAND_ALIASES.get(config.command) or Command(config.command)
        config.z_rule = ZRule(config.z_rule)
        config.mode = SurveyMode(config.mode)
        config.rule = ThresholdRule(config.rule)
        config.format = OutputFormat(config.format)
        config.cache_dir = Path(config.cache_dir)
        if config.output is not None:
            config.output = Path(config.output)
        return config

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def _need(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) in (None, [])]
        if missing:
            flags = ', '.join('--' + n.replace('_', '-') for n in missing)
            raise ConfigError(f"{self.command.value} requires {flags}")

    def _fail(self, condition: str) -> None:
        raise ConfigError(f"{self.command.value}: violated precondition {condition}")

    def grid(self) -> List[int]:
        """The x values of a grid command: --x-grid, else --x."""
        return sorted(self.x_grid) if self.x_grid else ([self.x] if self.x is not None else [])

    def validate(self) -> 'RunConfig':
        c = self.command
        if self.threads < 1:
            self._fail("--threads >= 1")
        if self.p_exhaustive < 5:
            self._fail("--p-exhaustive >= 5")

        if c is Command.SIEVE:
            self._need('x')
            if not 2 <= self.x <= SIEVE_CEILING:
                self._fail(f"2 <= x <= {SIEVE_CEILING}")
        elif c in (Command.HXYZ, Command.HXYZ_SHIFTED, Command.BV):
            self._need('x', 'y', 'z')
            if not 0 < self.y <= self.z <= self.x:
                self._fail("0 < y <= z <= x")
            if c is not Command.BV and self.x > H_CEILING:
                self._fail(f"x <= {H_CEILING}")
            if c is Command.BV and self.x > SIEVE_CEILING:
                self._fail(f"x <= {SIEVE_CEILING}")
            if c is Command.HXYZ_SHIFTED and not (self.lam != 0 and abs(self.lam) <= MAX_SHIFT):
                self._fail(f"lambda != 0 and |lambda| <= {MAX_SHIFT}")
        elif c is Command.SWEEP:
            self._need('x', 'y_list')
            if self.z_rule is ZRule.FIXED:
                self._need('z')
            if self.x > H_CEILING:
                self._fail(f"x <= {H_CEILING}")
        elif c is Command.SURVEY:
            self._need('x_hi')
            if self.mode is SurveyMode.EXHAUSTIVE and self.x_hi > self.p_exhaustive:
                self._fail(f"x_hi <= p_exhaustive = {self.p_exhaustive} in exhaustive mode")
            if self.x_hi > SIEVE_CEILING:
                self._fail(f"x_hi <= {SIEVE_CEILING}")
        elif c is Command.CENSUS:
            self._need('x')
            if self.x < 5:
                self._fail("x >= 5")
            if self.k1 is not None and self.k1 < 1:
                self._fail("k1 >= 1")
            if self.bound_scale <= 0:
                self._fail("bound scale > 0")
        elif c is Command.DUKE:
            self._need('x')
            if not 0 < self.epsilon <= EPSILON_LIMIT:
                self._fail("0 < epsilon <= 1/20")
            if not 3 <= self.x <= SIEVE_CEILING:
                self._fail(f"3 <= x <= {SIEVE_CEILING}")
            if self.realize < 0:
                self._fail("realize >= 0")
        elif c is Command.MERTENS:
            if not self.grid():
                self._need('x')
            if not 0 <= self.epsilon <= EPSILON_LIMIT:
                self._fail("0 <= epsilon <= 1/20")
            if min(self.grid()) < 2:
                self._fail("x >= 2")
        elif c is Command.BOUNDS:
            self._need('x')
            if self.genus < 1:
                self._fail("genus >= 1")
            if self.x < 2:
                self._fail("x >= 2")
            if self.k_tuple and not 1 <= len(self.k_tuple) <= 2 * self.genus - 1:
                self._fail(f"1 <= len(k) <= 2g - 1 = {2 * self.genus - 1}")
            if any(k < 1 for k in self.k_tuple):
                self._fail("every k_i >= 1")
        elif c in (Command.THRESHOLD, Command.HALF_THRESHOLD):
            if not self.grid():
                self._need('x')
            if max(self.grid()) > self.p_exhaustive:
                self._fail(f"x <= p_exhaustive = {self.p_exhaustive} (records come from the exhaustive survey)")
            if min(self.grid()) < 5:
                self._fail("x >= 5")
            if c is Command.HALF_THRESHOLD and self.epsilon < 0:
                self._fail("epsilon >= 0")
            if c is Command.THRESHOLD and not eta_in_range(self.eta):
                self._fail("0 < eta < 1/100")
        return self

    @property
    def k_for_bounds(self) -> List[int]:
        return self.k_tuple or [1] * (2 * self.genus - 1)
