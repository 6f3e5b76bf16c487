#!/usr/bin/env python3
"""Main entry point for the Unruh phase calculator."""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
