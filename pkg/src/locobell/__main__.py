import sys

from locobell.cli import main

sys.exit(main())
