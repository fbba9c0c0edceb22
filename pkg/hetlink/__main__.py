import sys

from hetlink.main import main

sys.exit(main())
