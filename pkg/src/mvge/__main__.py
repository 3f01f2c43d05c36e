import sys

from mvge.cli import main

sys.exit(main())
