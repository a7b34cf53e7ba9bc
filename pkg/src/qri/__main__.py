"""Entry point for ``python -m qri``."""

from ._cli import main

if __name__ == "__main__":
    main()
