import sys

from holotransfer.cli import main

sys.exit(main())
