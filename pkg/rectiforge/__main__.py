import sys

from rectiforge.cli import main

sys.exit(main())
