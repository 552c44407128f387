import sys

from evinc.cli import main

sys.exit(main())
