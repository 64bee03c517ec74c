#!/usr/bin/env python3
"""Development entrypoint for the verification command line."""

from heis_schwarzian import main


if __name__ == "__main__":
    main()
