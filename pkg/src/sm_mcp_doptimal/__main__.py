"""Entry point for python -m sm_mcp_doptimal."""

from . import main

if __name__ == "__main__":
    main()
