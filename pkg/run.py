#!/usr/bin/env python3
"""
underfit
Entry point script that runs the command line from the src package
"""

import asyncio
import sys
from src.main import main

if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        sys.exit(130)
