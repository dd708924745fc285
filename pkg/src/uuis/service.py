"""Facade wiring the store and every functional module together."""

from __future__ import annotations

import time

from . import backup as backup_mod
from .assets import AssetService
from .auth import AuthService
from .backup import BackupScheduler
from .config import AppConfig
from .errormgmt import ErrorService, ErrorStore
from .review import ReviewService
from .search import SearchService
from .store import Store
from .university import UniversityService
from .workflow import RequestService


class InventoryService:
    """One store, one error store, and the services that run on them."""

    def __init__(self, config: AppConfig | None = None, *, clock=time.time):
        self.config = config or AppConfig(store_path=":memory:")
        self.clock = clock
        self.store = Store(self.config.store_path,
                           pbkdf2_iterations=self.config.pbkdf2_iterations)
        self.store.initialize()
        self.error_store = ErrorStore(self.config.resolved_error_store_path())
        self.auth = AuthService(self.store,
                                idle_seconds=self.config.idle_seconds,
                                absolute_seconds=self.config.absolute_seconds,
                                clock=clock)
        self.search = SearchService(self.store, page_size=self.config.page_size)
        self.errors = ErrorService(self.error_store, self.store)
        sink = self.error_store.capture
        self.assets = AssetService(self.store, self.search,
                                   error_sink=lambda s, sev, msg: sink(s, sev, msg))
        self.university = UniversityService(
            self.store, backup_dir=self.config.backup_dir,
            error_sink=lambda s, sev, msg: sink(s, sev, msg))
        self.review = ReviewService(self.store)
        self.requests = RequestService(self.store)
        self.scheduler: BackupScheduler | None = None

    def start_scheduler(self, *, clock=None, sleep=None) -> BackupScheduler | None:
        """Launch the daily backup worker when a schedule is configured."""
        if not self.config.backup_daily_at:
            return None
        kwargs = {}
        if clock is not None:
            kwargs["clock"] = clock
        if sleep is not None:
            kwargs["sleep"] = sleep
        self.scheduler = BackupScheduler(
            self.store, self.config.backup_dir, self.config.backup_daily_at,
            error_sink=lambda s, sev, msg: self.error_store.capture(s, sev, msg),
            **kwargs)
        self.scheduler.start()
        return self.scheduler

    def backup_now(self) -> backup_mod.Archive:
        return backup_mod.dump(self.store)

    def close(self) -> None:
        if self.scheduler is not None:
            self.scheduler.stop()
        self.store.close()
        self.error_store.close()
