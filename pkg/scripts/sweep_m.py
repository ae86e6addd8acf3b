#!/usr/bin/env python3
"""Sweep the number of reflecting elements; thin wrapper around the CLI."""

import sys

from airs_rsma.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["sweep-m"] + sys.argv[1:]))
