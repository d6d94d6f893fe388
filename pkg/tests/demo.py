"""
Demo Script - Exponent Workbench Examples
Description: Walks through the main experiments on small inputs.

Run from the repository root:
    python -m tests.demo
"""

from src.curves.attainability import min_exponent_oracle, qk_bound, ruck_structures
from src.curves.elliptic_core import (
    CurvePoint,
    WeierstrassCurve,
    exponent,
    group_structure,
    point_order,
    quadratic_twist_counts,
)
from src.experiments.duke_construction import DukeExperiment, bv_check
from src.experiments.survey import SurveyExperiment
from src.experiments.theorem_checks import CensusExperiment, ThresholdExperiment
from src.number_theory.divisor_stats import DivisorWindow, ZRule, count_H, ratio_sweep


def print_header(title):
    """Print a formatted header."""
    print("\n" + "=" * 60)
    print(f"  {title}")
    print("=" * 60)


def print_steps(steps, show_all=False):
    """Print experiment steps."""
    if show_all:
        for step in steps:
            print(f"\n  Step {step['step_number']}: {step['title']}")
            print(f"    → {step['description']}")
            if step['details']:
                print(f"    ℹ {step['details']}")
    else:
        print(f"\n  ℹ Total steps: {len(steps)}")
        print(f"    First: {steps[0]['title']}")
        print(f"    Last: {steps[-1]['title']}")


def demo_curves():
    """Point counts, orders and structures of single curves."""
    print_header("ELLIPTIC CURVES OVER SMALL FIELDS")

    print("\n📝 Example 1: y^2 = x^3 + 2 over F_7")
    E = WeierstrassCurve(7, 0, 2)
    gs = group_structure(E)
    print(f"  Order: {gs.N}, structure Z/{gs.m1} x Z/{gs.m2}, exponent {gs.exponent}")
    print(f"  Order of (0, 3): {point_order(E, CurvePoint(0, 3))}")
    N, N_twist = quadratic_twist_counts(E)
    print(f"  Twist has {N_twist} points ({N} + {N_twist} = 2p + 2)")
    print(f"  Exponent of y^2 = x^3 + 6: {exponent(WeierstrassCurve(7, 0, 6))}")

    print("\n📝 Example 2: Which structures can order 9 have over F_7?")
    print(f"  {ruck_structures(7, 9)}")

    print("\n📝 Example 3: Smallest possible exponent per prime")
    for q in (5, 7, 11, 101, 1009):
        best = min_exponent_oracle(q)
        print(f"  q = {q:5d}: exponent {best.exponent} via N = {best.N} = {best.m1} x {best.m2}")


def demo_survey():
    """Exhaustive survey and the three-quarter threshold check."""
    print_header("MINIMUM EXPONENT SURVEY")

    records, steps = SurveyExperiment().run(x_lo=5, x_hi=60)
    print_steps(steps)
    for r in records[:6]:
        print(f"  q = {r.q:3d}: min exponent {r.min_exponent} at (a, b) = ({r.witness.a}, {r.witness.b})")

    reports, _ = ThresholdExperiment(records).run(x_grid=[60])
    report = reports[0]
    print(f"\n  Below q^(3/4): {len(report.exceptions)} of {report.primes} primes")
    for e in report.exceptions[:5]:
        print(f"    q = {e.q}: m1 = {e.m1}, class {e.proof_class}")


def demo_divisors():
    """Integers with a divisor in (y, z]."""
    print_header("DIVISORS IN AN INTERVAL")

    print(f"\n  H(100, 2, 4) = {count_H(DivisorWindow(100, 2, 4))}")
    for row in ratio_sweep(10**5, [20, 40, 80], ZRule.DOUBLE):
        print(f"  y = {row.y:g}: H = {row.H}, estimate {row.estimate:.1f}, ratio {row.ratio:.3f}")

    report = bv_check(100, 3, 10)
    print(f"\n  Equidistribution error over (3, 10] at x = 100: {report.error_sum:.5f}")


def demo_census():
    """Q_k census against its bound."""
    print_header("Q_k CENSUS")

    reports, _ = CensusExperiment().run(x=100, k1_values=[1, 2, 3])
    for r in reports:
        print(f"  k1 = {r.k1}: observed {r.observed}, bound {r.bound:.1f}")
    print(f"  ✓ Within bound: {not any(r.exceeds for r in reports)}")
    print(f"  ℹ U V at k1 = 2: {qk_bound(100, 1, (2,)).bound}")


def demo_construction():
    """Curves with exponent below q^(3/4 + eps)."""
    print_header("SMALL EXPONENT CONSTRUCTION")

    findings, steps = DukeExperiment().run(x=10**4, epsilon=0.05, realize=1)
    first = findings[0]
    E = first.realized_curve
    print(f"  First finding: q = {first.q}, p = {first.p_divisor}, k = {first.k_order}")
    print(f"  Exponent {first.target_exponent} <= q^0.8 = {first.threshold:.1f}")
    print(f"  Realised as y^2 = x^3 + {E.a}x + {E.b}")
    print_steps(steps[:3], show_all=True)


def main():
    """Run all demonstrations."""
    print("\n" + "=" * 60)
    print("  EXPONENT WORKBENCH DEMONSTRATION")
    print("=" * 60)

    demo_curves()
    demo_survey()
    demo_divisors()
    demo_census()
    demo_construction()

    print_header("DEMONSTRATION COMPLETE")
    print("\n✓ All examples executed successfully!")
    print("\n💡 Next steps:")
    print("  • Run 'python run_workbench.py --help' for every command")
    print("  • Survey a larger range with --threads and --cache-dir")
    print("\n📚 For more info: Read README.md and docs/QUICKSTART.md")
    print()


if __name__ == "__main__":
    main()
