import sys

from cascadelab.cli import main

sys.exit(main())
