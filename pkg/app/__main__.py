#!/usr/bin/env python3
"""
Makes the app package executable with: python -m app
"""
from app.cli import cli

if __name__ == "__main__":
    cli()
