import sys

from blockmass.cli import main

sys.exit(main())
