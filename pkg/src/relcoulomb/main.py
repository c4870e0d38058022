"""
Entry point for the relcoulomb command-line tool
"""
import logging
from typing import Optional, Sequence

from dotenv import load_dotenv

from relcoulomb.cli import run
from relcoulomb.settings import get_settings

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    load_dotenv()
    settings = get_settings()

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    status = run(argv, settings)
    if status == 0:
        logger.info("✅ Done")
    else:
        logger.error(f"❌ Exited with status {status}")
    return status


if __name__ == "__main__":
    exit(main())
