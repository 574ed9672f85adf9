import sys

from benaloh.cli import main

sys.exit(main())
