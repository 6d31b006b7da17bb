"""Module entry point: python -m emowear."""

import sys

from .cli import main

sys.exit(main())
