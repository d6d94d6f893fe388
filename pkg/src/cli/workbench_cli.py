"""
Workbench Command Line
Description: Runs one workbench command and writes its report as CSV or JSON lines.

Exit status:
    0   success
    1   any other workbench error (capacity, uncertified structure, cache, ...)
    2   usage error (bad flag, violated precondition)
    3   a check failed (census above its bound, exception checks broken)
"""

import argparse
import logging
import sys
from contextlib import contextmanager
from typing import List, Optional, Tuple

from ..curves.attainability import (
    eta_in_range,
    exponent_floor,
    hasse_window,
    k_set_membership,
    qk_bound,
    trivial_exponent_bound,
)
from ..errors import ArgumentError, ConfigError, WorkbenchError
from ..experiments.duke_construction import (
    BV_HEADER,
    DUKE_HEADER,
    MERTENS_HEADER,
    DukeExperiment,
    PrimeSumExperiment,
    bv_check,
)
from ..experiments.survey import SURVEY_HEADER, SurveyExperiment, SurveyMode, survey_range
from ..experiments.theorem_checks import (
    CENSUS_HEADER,
    EXCEPTION_HEADER,
    THRESHOLD_SUMMARY_HEADER,
    CensusExperiment,
    ThresholdExperiment,
)
from ..number_theory.divisor_stats import (
    SWEEP_HEADER,
    DivisorWindow,
    count_H,
    count_H_shifted,
    ratio_sweep,
)
from ..number_theory.prime_engine import sieve_range
from .cache import SurveyCache
from .config import Command, OutputFormat, RunConfig, default_cache_dir
from .reporting import render_steps, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3

Report = Tuple[List[dict], List[str], List[str], List[dict]]  # rows, header, violations, steps


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.replace(',', ' ').split()]


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.replace(',', ' ').split()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=[f.value for f in OutputFormat], default='csv',
                        help='Report format (default: csv)')
    common.add_argument('--output', help='Write the report to this file instead of standard output')
    common.add_argument('--threads', type=int, default=1, help='Worker processes for surveys')
    common.add_argument('--cache-dir', dest='cache_dir', default=None,
                        help='Survey cache directory (default: $JACOBIAN_WORKBENCH_CACHE or ./.workbench_cache)')
    common.add_argument('--resume', action='store_true', help='Reuse cached survey records')
    common.add_argument('--p-exhaustive', dest='p_exhaustive', type=int, default=None,
                        help='Largest prime scanned exhaustively')
    common.add_argument('--verbose', action='store_true', help='Print the steps of the run to standard error')
    common.add_argument('--details', action='store_true', help='Threshold checks: list every exception')
    common.add_argument('--log-level', dest='log_level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    parser = argparse.ArgumentParser(
        prog='run_workbench.py',
        description='Jacobian exponent workbench - exact experiments on exponents of elliptic curve groups.',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  Survey minimum exponents:
    python run_workbench.py survey --x-lo 5 --x-hi 11

  Count integers with a divisor in (y, z]:
    python run_workbench.py hxyz --x 100 --y 2 --z 4

  Small exponent construction:
    python run_workbench.py duke --x 10000 --epsilon 0.05
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name: str, help_text: str, aliases: Tuple[str, ...] = ()) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text, aliases=list(aliases))

    p = add('sieve', 'Sieve [0, x] and report pi(x)')
    p.add_argument('--x', type=int)

    for name, help_text in (('hxyz', 'H(x, y, z)'), ('hxyz-shifted', 'H(x, y, z, P_lambda)'),
                            ('bv', 'Equidistribution error sum over primes in (y, z]')):
        p = add(name, help_text)
        p.add_argument('--x', type=int)
        p.add_argument('--y', type=float)
        p.add_argument('--z', type=float)
        if name == 'hxyz-shifted':
            p.add_argument('--lambda', dest='lam', type=int, default=-1)

    p = add('ford-sweep', 'H and H_shifted against the upper estimate over several y', aliases=('sweep',))
    p.add_argument('--x', type=int)
    p.add_argument('--y-list', dest='y_list', type=_float_list)
    p.add_argument('--z-rule', dest='z_rule', choices=['double', 'square', 'fixed-z'], default='double')
    p.add_argument('--z', type=float, help='z for --z-rule fixed-z')
    p.add_argument('--lambda', dest='lam', type=int, default=-1)

    p = add('survey', 'Minimum exponent per prime')
    p.add_argument('--x-lo', dest='x_lo', type=int, default=5)
    p.add_argument('--x-hi', dest='x_hi', type=int)
    p.add_argument('--mode', choices=[m.value for m in SurveyMode], default='exhaustive')

    p = add('census', 'Q_k1 census against its bound')
    p.add_argument('--x', type=int)
    p.add_argument('--k1', type=int, help='Single k1 (default: every k1 <= sqrt(x) + 1)')
    p.add_argument('--bound-scale', dest='bound_scale', type=float, default=1.0,
                   help='Multiply the bound (fault injection)')

    p = add('duke', 'Curves with exponent below q^(3/4 + eps)')
    p.add_argument('--x', type=int)
    p.add_argument('--epsilon', type=float, default=0.05)
    p.add_argument('--realize', type=int, default=1, help='Realise the first N findings as curves')

    p = add('mertens', 'Sum of 1/p over (x^(1/4-eps), x^(1/4-eps/2)]')
    p.add_argument('--x', type=int)
    p.add_argument('--x-grid', dest='x_grid', type=_int_list)
    p.add_argument('--epsilon', type=float, default=0.05)

    p = add('bounds', 'Evaluate the closed-form bounds at q = x')
    p.add_argument('--x', type=int)
    p.add_argument('--genus', type=int, default=1)
    p.add_argument('--k', dest='k_tuple', type=_int_list)
    p.add_argument('--eta', type=float, default=0.005)

    for name, alias, help_text in (('thm1', 'threshold', 'Three-quarter threshold check'),
                                   ('thm3', 'half-threshold', 'Half threshold check')):
        p = add(name, help_text, aliases=(alias,))
        p.add_argument('--x', type=int)
        p.add_argument('--x-grid', dest='x_grid', type=_int_list)
        p.add_argument('--epsilon', type=float, default=0.0 if name == 'thm1' else 0.05)
        if name == 'thm1':
            p.add_argument('--rule', choices=['constant', 'duke-log', 'trivial'], default='constant')
            p.add_argument('--eta', type=float, default=0.005)
    return parser


# ============================================================================
# COMMANDS
# ============================================================================

def _cache(config: RunConfig) -> SurveyCache:
    return SurveyCache(config.cache_dir or default_cache_dir(), read_enabled=config.resume)


def _run_sieve(c: RunConfig) -> Report:
    sieve = sieve_range(c.x)
    largest = int(sieve.primes[-1]) if sieve.primes.size else None
    return [{'x': c.x, 'pi': int(sieve.primes.size), 'largest': largest}], ['x', 'pi', 'largest'], [], []


def _run_hxyz(c: RunConfig) -> Report:
    w = DivisorWindow(c.x, c.y, c.z)
    if c.command is Command.HXYZ:
        return [{'x': c.x, 'y': c.y, 'z': c.z, 'H': count_H(w)}], ['x', 'y', 'z', 'H'], [], []
    row = {'x': c.x, 'y': c.y, 'z': c.z, 'lambda': c.lam, 'H_shifted': count_H_shifted(w, c.lam)}
    return [row], ['x', 'y', 'z', 'lambda', 'H_shifted'], [], []


def _run_sweep(c: RunConfig) -> Report:
    rows = ratio_sweep(c.x, c.y_list, c.z_rule, fixed_z=c.z, lam=c.lam)
    return [r.as_dict() for r in rows], SWEEP_HEADER, [], []


def _run_survey(c: RunConfig) -> Report:
    experiment = SurveyExperiment(store=_cache(c), workers=c.threads, p_exhaustive=c.p_exhaustive,
                                  progress=sys.stderr.isatty())
    records, steps = experiment.run(x_lo=c.x_lo, x_hi=c.x_hi, mode=c.mode)
    return [r.as_row() for r in records], SURVEY_HEADER, [], steps


def _run_census(c: RunConfig) -> Report:
    experiment = CensusExperiment(p_exhaustive=c.p_exhaustive, bound_scale=c.bound_scale)
    reports, steps = experiment.run(x=c.x, k1_values=[c.k1] if c.k1 else ())
    violations = [v for r in reports for v in r.violations()]
    return [r.as_row() for r in reports], CENSUS_HEADER, violations, steps


def _run_duke(c: RunConfig) -> Report:
    findings, steps = DukeExperiment(p_exhaustive=c.p_exhaustive).run(x=c.x, epsilon=c.epsilon,
                                                                       realize=c.realize)
    return [f.as_row() for f in findings], DUKE_HEADER, [], steps


def _run_mertens(c: RunConfig) -> Report:
    reports, steps = PrimeSumExperiment().run(x_grid=c.grid(), epsilon=c.epsilon)
    return [r.as_row() for r in reports], MERTENS_HEADER, [], steps


def _run_bv(c: RunConfig) -> Report:
    return [bv_check(c.x, c.y, c.z).as_row()], BV_HEADER, [], []


def _run_bounds(c: RunConfig) -> Report:
    q, g, k = c.x, c.genus, c.k_for_bounds
    window = hasse_window(q, g)
    rows = [
        {'quantity': 'window_lower', 'value': window.lower},
        {'quantity': 'window_upper', 'value': window.upper},
        {'quantity': 'window_lo_int', 'value': window.lo_int},
        {'quantity': 'window_hi_int', 'value': window.hi_int},
        {'quantity': 'trivial_bound', 'value': trivial_exponent_bound(q, g)},
        {'quantity': f'exponent_floor_s{len(k)}', 'value': exponent_floor(q, g, len(k), k)},
    ]
    if len(k) == 2 * g - 1:
        bound = qk_bound(q, g, k)
        rows += [{'quantity': 'qk_U', 'value': bound.U}, {'quantity': 'qk_V', 'value': bound.V},
                 {'quantity': 'qk_bound', 'value': bound.bound}]
        if eta_in_range(c.eta, g):
            flags = k_set_membership(q, c.eta, g, k)
            rows += [{'quantity': 'k_outside_I', 'value': flags.outside_interval},
                     {'quantity': 'k_weighted_first_half', 'value': flags.weighted_first_half},
                     {'quantity': 'k_weighted_all', 'value': flags.weighted_all},
                     {'quantity': 'k_in_K', 'value': flags.in_K}]
    return rows, ['quantity', 'value'], [], []


def _run_threshold(c: RunConfig) -> Report:
    grid = c.grid()
    records = survey_range(5, max(grid), SurveyMode.EXHAUSTIVE, workers=c.threads, store=_cache(c),
                           p_exhaustive=c.p_exhaustive, progress=sys.stderr.isatty())
    experiment = ThresholdExperiment(records, half=c.command is Command.HALF_THRESHOLD)
    reports, steps = experiment.run(x_grid=grid, rule=c.rule, epsilon=c.epsilon, eta=c.eta)
    violations = [v for r in reports for v in r.violations()]
    if c.details:
        rows = [dict(row, x=r.x) for r in reports for row in r.exception_rows()]
        return rows, ['x'] + EXCEPTION_HEADER, violations, steps
    return [r.summary_row() for r in reports], THRESHOLD_SUMMARY_HEADER, violations, steps


COMMANDS = {
    Command.SIEVE: _run_sieve,
    Command.HXYZ: _run_hxyz,
    Command.HXYZ_SHIFTED: _run_hxyz,
    Command.SWEEP: _run_sweep,
    Command.SURVEY: _run_survey,
    Command.CENSUS: _run_census,
    Command.DUKE: _run_duke,
    Command.MERTENS: _run_mertens,
    Command.BV: _run_bv,
    Command.BOUNDS: _run_bounds,
    Command.THRESHOLD: _run_threshold,
    Command.HALF_THRESHOLD: _run_threshold,
}


@contextmanager
def _output(config: RunConfig):
    if config.output is None:
        yield sys.stdout
    else:
        with open(config.output, 'w', encoding='utf-8', newline='\n') as fh:
            yield fh


def dispatch(config: RunConfig) -> int:
    """
    Run one validated command and write its report.

    Returns:
        int: EXIT_OK, or EXIT_VIOLATION when a check failed
    """
    rows, header, violations, steps = COMMANDS[config.command](config)
    with _output(config) as stream:
        write_report(rows, header, config.format, stream)
    if config.verbose and steps:
        render_steps(steps)
    for v in violations:
        logger.error("check failed: %s", v)
    return EXIT_VIOLATION if violations else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        config = RunConfig.from_namespace(args).validate()
        return dispatch(config)
    except (ConfigError, ArgumentError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WorkbenchError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
