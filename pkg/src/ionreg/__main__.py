"""Allow ``python -m ionreg`` to behave like the installed console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
