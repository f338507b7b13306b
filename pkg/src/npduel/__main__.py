import sys

from npduel.cli import main

sys.exit(main())
