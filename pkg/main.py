import sys

from api.routers import run

if __name__ == "__main__":
    sys.exit(run())
