from evapfront.cli import main
import sys

sys.exit(main())
