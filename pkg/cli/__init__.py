"""
CLI Module

Command-line interface and the example corpus runner.
"""

from .commands import CLIHandler
from .corpus import CorpusEntry, CorpusRunner, build_corpus

__all__ = ['CLIHandler', 'CorpusEntry', 'CorpusRunner', 'build_corpus']
