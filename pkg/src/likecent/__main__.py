import sys

from likecent.cli import main

sys.exit(main())
