import logging, sys
import logging.handlers

from essence_kit.config import get_settings

_settings = get_settings()
LOG_DIR = _settings.log_dir.expanduser()
LOG_DIR.mkdir(parents=True, exist_ok=True)

# stdout is reserved for --format json
logging.basicConfig(
    level=getattr(logging, _settings.log_level, logging.INFO),
    format="%(asctime)s %(levelname)-8s %(name)s | %(message)s",
    handlers=[
        logging.StreamHandler(sys.stderr),
        logging.handlers.RotatingFileHandler(LOG_DIR/"essence-kit.log",
                                             maxBytes=5_000_000, backupCount=5)
    ]
)
