#!/usr/bin/env python3
"""Standalone entry point; works from the source tree without installation."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from figrender.render import main

if __name__ == "__main__":
    sys.exit(main())
