#!/usr/bin/env python
"""
summix - streaming SummaryMixing / MHSA encoder benchmarks

Usage:
  python summix.py bench --mixing summary --out sm.csv --plot sm.svg
  python summix.py bench --profile quick_mhsa --out mhsa.csv
  python summix.py report --inputs sm.csv,mhsa.csv --out comparison.md
  python summix.py mask --t 6 --chunk-frames 2 --left 1

Exit codes: 0 success, 2 validation error, 3 I/O error
"""
import sys
from pathlib import Path

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from src.bench.cli import main


if __name__ == "__main__":
    sys.exit(main())
