#!/usr/bin/env python3
"""Command-line launcher for the Liouville solver.

Usage:
    python scripts/liouville.py seq audit --l 3 --max-i 7
    python scripts/liouville.py solve --system data/systems/y_equals_one.json --out result.json
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
