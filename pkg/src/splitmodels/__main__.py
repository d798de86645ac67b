"""Module entry point so ``python -m splitmodels`` behaves like the CLI."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
