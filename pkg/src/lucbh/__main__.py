import sys

from lucbh.cli import main

sys.exit(main())
