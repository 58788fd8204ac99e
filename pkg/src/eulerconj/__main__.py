import sys

from eulerconj.cli import main

sys.exit(main())
