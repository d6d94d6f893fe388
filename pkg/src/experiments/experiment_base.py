"""
Base Experiment Interface
Description: Abstract base class for every experiment the workbench runs.

================================================================================
DESIGN PATTERN: STRATEGY PATTERN
================================================================================
Each experiment (survey, census, construction, threshold verifiers, prime-sum
checks) inherits from ExperimentBase, so the command line can dispatch to any
of them the same way.

INTERFACE CONTRACT:
  - run(**params) -> (report, steps)
  - get_experiment_name() -> name string
  - report exposes rows() (list of dicts in header order) and violations()
    (check failures; empty when everything holds)
  - steps is a list of dicts describing what happened, in order
================================================================================
"""

from abc import ABC, abstractmethod
from typing import Any, List, Optional, Tuple


class ExperimentBase(ABC):
    """
    Abstract base class for all experiments.

    run() returns a tuple of:
      1. The report object
      2. A list of step dictionaries

    Each step dictionary contains:
      - 'step_number': int - Sequential step number
      - 'title': str - Short title for the step
      - 'description': str - What happened in this step
      - 'details': str - Technical details (may be empty)
      - 'data': optional machine-readable payload
    """

    @abstractmethod
    def run(self, **params) -> Tuple[Any, List[dict]]:
        """
        Run the experiment.

        Returns:
            Tuple[report, List[dict]]: (report, list of step information)
        """

    @abstractmethod
    def get_experiment_name(self) -> str:
        """Human-readable experiment name (e.g., "Minimum exponent survey")."""

    @staticmethod
    def add_step(steps: List[dict], title: str, description: str,
                 details: str = '', data: Optional[Any] = None) -> None:
        """Append a step dictionary numbered after the previous one."""
        step = {
            'step_number': len(steps),
            'title': title,
            'description': description,
            'details': details,
        }
        if data is not None:
            step['data'] = data
        steps.append(step)
