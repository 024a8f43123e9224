import sys

from rtal.main import main

sys.exit(main())
