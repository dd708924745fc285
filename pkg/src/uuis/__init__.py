"""Role-scoped university inventory service."""

from .config import AppConfig, load_config
from .service import InventoryService

__all__ = ["AppConfig", "InventoryService", "load_config"]
__version__ = "0.1.0"
