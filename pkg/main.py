"""
glupoly - Independence polynomials of recursively glued graphs
Main entry point for the application
"""

import sys
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent))

from src.utils.logger import logger
from src.core.config_manager import config


def main(argv=None):
    """Main entry point"""
    argv = list(sys.argv[1:] if argv is None else argv)

    # Load custom config if specified before the subcommand
    if len(argv) >= 2 and argv[0] == '--config':
        config_file = argv[1]
        argv = argv[2:]
        try:
            config.import_config(config_file)
            logger.info(f"Loaded configuration from: {config_file}")
        except (OSError, ValueError) as e:
            logger.error(f"Failed to load configuration: {e}")
            return 1

    is_valid, errors = config.validate()
    if not is_valid:
        for error in errors:
            logger.error(f"Configuration: {error}")
        return 2

    from src.cli.commands import run
    return run(argv)


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("glupoly interrupted by user")
        sys.exit(0)
    except Exception as e:
        logger.critical(f"Fatal error: {e}")
        sys.exit(1)
