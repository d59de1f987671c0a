"""Command-line entry point for running from a source checkout."""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
