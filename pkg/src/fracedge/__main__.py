import sys

from fracedge.cli import main

sys.exit(main())
