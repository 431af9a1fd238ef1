"""
QMaxFlow - Quantum Max-Flow of Tensor Networks

Main entry point for the QMaxFlow command-line tool.
Inputs go in on the left; the rank comes out on the right.
"""

import sys

from cli import CLIHandler
from config import get_config
from logger import get_logger, log_shutdown, log_startup


logger = get_logger(__name__)


class QMaxFlowApp:
    """
    Application controller.

    Owns the configuration and runs one CLI invocation.
    """

    def __init__(self):
        """Initialize the application."""
        self.config = get_config()
        log_startup()
        logger.info(f"QMaxFlow initializing | Config: {self.config.config_file}")

    def run(self, args=None) -> int:
        """
        Run one command.

        Args:
            args: Command-line arguments

        Returns:
            Exit code
        """
        try:
            return CLIHandler().handle(args)
        except Exception as e:
            logger.error(f"CLI mode failed: {e}", exc_info=True)
            print(f"error: {e}", file=sys.stderr)
            return 1
        finally:
            log_shutdown()


def main():
    """Main entry point for QMaxFlow."""
    app = QMaxFlowApp()
    sys.exit(app.run())


if __name__ == '__main__':
    main()
