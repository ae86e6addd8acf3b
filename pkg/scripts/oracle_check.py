#!/usr/bin/env python3
"""Cross-check the optimizer against the independent references."""

import sys

from airs_rsma.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["oracle-check"] + sys.argv[1:]))
