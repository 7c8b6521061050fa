"""Entry point for the reference protocol server.

Run as ``python -m gtorder.oracle_server --n N --seed S`` to answer
group-test queries for a seeded builtin instance on stdin/stdout.
"""

import sys

from .external import main

if __name__ == "__main__":
    sys.exit(main())
