import sys

from ffcorr.cli import main

sys.exit(main())
