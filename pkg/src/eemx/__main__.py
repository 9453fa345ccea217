import sys

from eemx.cli import main

sys.exit(main())
