#!/usr/bin/env python3
"""
arbcolor entry point: python main.py <generate|run|sweep|verify> ...
"""

import logging
import os
import sys

# Add the project directory to Python path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from arbcolor.cli import main
from arbcolor.utils.config import get_settings

if __name__ == "__main__":
    logging.basicConfig(level=get_settings().log_level, stream=sys.stderr)
    sys.exit(main())
