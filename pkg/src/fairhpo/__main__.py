import sys

from fairhpo.cli import main

sys.exit(main())
