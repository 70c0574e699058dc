import sys

from bcdof.cli import main

sys.exit(main())
