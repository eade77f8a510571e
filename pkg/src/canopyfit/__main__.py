import sys

from canopyfit.pipeline.cli import main

sys.exit(main())
