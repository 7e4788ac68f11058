"""
Main entry point for running salemcount as a module.
"""

from salemcount.cli import app

if __name__ == "__main__":
    app()
