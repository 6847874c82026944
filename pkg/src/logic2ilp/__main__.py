import sys

from logic2ilp.cli import main

sys.exit(main())
