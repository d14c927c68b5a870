"""
Command-line package - manifest model and subcommands
"""
from .app import create_parser, run, main

__all__ = ['create_parser', 'run', 'main']
