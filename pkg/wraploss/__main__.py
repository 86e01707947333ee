"""Module and console entrypoint.

- Development: python -m wraploss
- Installed:   wraploss
"""

import sys


def __main__() -> None:
    from app.deps import ensure_runtime_deps

    try:
        ensure_runtime_deps()
    except RuntimeError as exc:
        print(exc, file=sys.stderr)
        sys.exit(3)

    from app.cli import main

    sys.exit(main())


if __name__ == "__main__":
    __main__()
