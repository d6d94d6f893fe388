#!/usr/bin/env python3
"""
Workbench Launcher
Quick launcher for the Jacobian exponent workbench command line.
"""

import sys
from pathlib import Path


def main():
    """Launch the workbench CLI."""
    sys.path.insert(0, str(Path(__file__).parent))
    try:
        from src.cli.workbench_cli import main as cli_main
    except ImportError as e:
        print(f"Error: missing dependency - {e}", file=sys.stderr)
        print("Install the requirements with: pip install -r requirements.txt", file=sys.stderr)
        return 1
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
