"""
glupoly CLI Wrapper
Convenient command-line interface for glupoly
"""

import sys
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent))

from src.cli.commands import run

if __name__ == '__main__':
    sys.exit(run(sys.argv[1:]))
