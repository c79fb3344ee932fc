"""Subcommands, every module here exposes `setup(subparsers)`."""
