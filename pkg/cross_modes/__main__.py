import sys

from cross_modes.cli import main

sys.exit(main())
