#!/usr/bin/env python3
"""
Launcher for the lambdagent command line without installing the package.

    python run.py lint lambdagent/data/baselines --summary
    python run.py harness run-matrix
"""

import sys

from lambdagent.api.cli import main as cli_main
from lambdagent.api.harness_cli import main as harness_main

if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] == "harness":
        del sys.argv[1]
        harness_main()
    else:
        cli_main()
