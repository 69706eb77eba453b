"""Console entry point: hand over to the bundled binary."""

import os
import sys

from . import cli_path


def main():
    argv = [cli_path()] + sys.argv[1:]
    os.execv(argv[0], argv)


if __name__ == "__main__":
    main()
