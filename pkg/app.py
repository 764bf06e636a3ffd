"""
Unitary Constellation Designer - Command-line entry point
"""

import sys

from src.cli.commands import run

# Run command:
# python app.py --help


def main(argv=None) -> int:
    """Main application function"""
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
