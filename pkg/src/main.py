#!/usr/bin/env python3
"""
scoreriesz - Main Entry Point

Command-line application that estimates Riesz representers by score matching
and uses them in cross-fitted estimates of ATE, AME and APE.
"""

import sys
import os

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from scoreriesz.cli import main


if __name__ == "__main__":
    sys.exit(main())
