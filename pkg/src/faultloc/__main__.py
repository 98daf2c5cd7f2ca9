import sys

from faultloc.cli import main

sys.exit(main())
