import sys

from robustcalib.cli import main

sys.exit(main())
