"""Logical backup archives: dump, restore, files, and the daily scheduler.

An archive is a self-describing JSON document: a header (format tag,
version, creation timestamp, checksum) followed by per-table row sections.
The checksum covers the table payload and sequence counters but not the
timestamp, so two dumps of identical stores verify as equal.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import ServiceError
from .store import CORE_TABLES, Store, utcnow_text

FORMAT_TAG = "uuis-backup"
FORMAT_VERSION = 1

# Tables whose AUTOINCREMENT counter must survive a round trip so ids keep
# increasing after a restore.
SEQUENCED_TABLES = ("items", "itemproperties", "logs", "requests")


@dataclass
class Archive:
    created_at: str
    tables: dict            # table -> {"columns": [...], "rows": [[...]]}
    sequences: dict         # table -> last issued id
    checksum: str

    def payload_equal(self, other: "Archive") -> bool:
        return self.checksum == other.checksum


def _payload_checksum(tables: dict, sequences: dict) -> str:
    blob = json.dumps({"tables": tables, "sequences": sequences},
                      sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def dump(store: Store) -> Archive:
    """Snapshot every core table under one read-consistent transaction."""
    tables = {}
    sequences = {}
    with store.transaction(system=True) as txn:
        for name in sorted(CORE_TABLES):
            cur = txn.execute(f"SELECT * FROM {name} ORDER BY rowid")
            columns = [d[0] for d in cur.description]
            rows = [list(r) for r in cur.fetchall()]
            tables[name] = {"columns": columns, "rows": rows}
        for name in SEQUENCED_TABLES:
            row = txn.query_one(
                "SELECT seq FROM sqlite_sequence WHERE name = ?", (name,))
            sequences[name] = row["seq"] if row else 0
    return Archive(created_at=utcnow_text(), tables=tables, sequences=sequences,
                   checksum=_payload_checksum(tables, sequences))


def verify(archive: Archive) -> None:
    if archive.checksum != _payload_checksum(archive.tables, archive.sequences):
        raise ServiceError("corrupt-archive", "archive checksum mismatch")
    missing = set(CORE_TABLES) - set(archive.tables)
    if missing:
        raise ServiceError("corrupt-archive",
                           f"archive is missing tables: {sorted(missing)}")


def restore(store: Store, archive: Archive, *, overwrite: bool = False) -> None:
    """Load an archive, leaving the target equal to the dumped store.

    Fails closed: the checksum is verified and the occupancy check runs
    before anything is touched. A target holding any rows requires
    `overwrite`.
    """
    verify(archive)
    existing = set(store.table_names())
    with store.transaction(system=True) as txn:
        for name, ddl in CORE_TABLES.items():
            if name not in existing:
                txn.execute(ddl)
        if not overwrite:
            for name in CORE_TABLES:
                if name in existing and \
                        txn.query_one(f"SELECT 1 FROM {name} LIMIT 1") is not None:
                    raise ServiceError(
                        "invalid-state",
                        "target store is not empty; pass overwrite to replace it")
        for name in CORE_TABLES:
            txn.execute(f"DELETE FROM {name}")
        for name, section in archive.tables.items():
            cols = section["columns"]
            placeholders = ",".join("?" * len(cols))
            txn.executemany(
                f"INSERT INTO {name} ({','.join(cols)}) VALUES ({placeholders})",
                section["rows"])
        for name, seq in archive.sequences.items():
            txn.execute("DELETE FROM sqlite_sequence WHERE name = ?", (name,))
            txn.execute("INSERT INTO sqlite_sequence (name, seq) VALUES (?, ?)",
                        (name, seq))


def to_json(archive: Archive) -> str:
    return json.dumps({
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "created_at": archive.created_at,
        "checksum": archive.checksum,
        "tables": archive.tables,
        "sequences": archive.sequences,
    }, sort_keys=True)


def from_json(text: str) -> Archive:
    try:
        doc = json.loads(text)
        if doc.get("format") != FORMAT_TAG or doc.get("version") != FORMAT_VERSION:
            raise ServiceError("corrupt-archive", "unrecognized archive format")
        archive = Archive(created_at=doc["created_at"], tables=doc["tables"],
                          sequences=doc["sequences"], checksum=doc["checksum"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ServiceError("corrupt-archive", f"unreadable archive: {exc}") from None
    verify(archive)
    return archive


def write_archive_file(store: Store, directory: str | Path, kind: str) -> tuple[Path, Archive]:
    """Dump the store into `directory` under a collision-free name."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        archive = dump(store)
        stamp = archive.created_at.replace(" ", "T").replace(":", "")
        path = directory / f"{kind}-{stamp}.json"
        n = 0
        while path.exists():
            n += 1
            path = directory / f"{kind}-{stamp}-{n}.json"
        path.write_text(to_json(archive))
    except OSError as exc:
        raise ServiceError("backup-failed", f"could not write archive: {exc}") from exc
    return path, archive


def read_archive_file(path: str | Path) -> Archive:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ServiceError("corrupt-archive", f"unreadable archive file: {exc}") from exc
    return from_json(text)


class BackupScheduler:
    """Daily backup worker.

    Runs in its own thread, holding the store lock only while the snapshot
    is taken. The clock and sleep functions are injectable so schedules can
    be driven by an accelerated clock.
    """

    def __init__(self, store: Store, directory: str | Path, daily_at: str, *,
                 clock=time.time, sleep=time.sleep, error_sink=None):
        self.store = store
        self.directory = Path(directory)
        self.hour, self.minute = self._parse_time(daily_at)
        self.clock = clock
        self._sleep = sleep
        self.error_sink = error_sink
        self.runs: list[Path] = []
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    @staticmethod
    def _parse_time(daily_at: str) -> tuple[int, int]:
        try:
            hour_s, minute_s = daily_at.split(":")
            hour, minute = int(hour_s), int(minute_s)
            if not (0 <= hour < 24 and 0 <= minute < 60):
                raise ValueError
        except ValueError:
            raise ServiceError("invalid-argument",
                               f"schedule must be HH:MM, got {daily_at!r}") from None
        return hour, minute

    def next_run_after(self, now: float) -> float:
        day = 86400.0
        seconds_of_day = now % day
        target = self.hour * 3600 + self.minute * 60
        base = now - seconds_of_day + target
        return base if base > now else base + day

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, name="backup-scheduler",
                                        daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=10)

    def run_once(self) -> Path:
        path, _ = write_archive_file(self.store, self.directory, "auto")
        with self.store.transaction() as txn:
            txn.record_log(None, None, "backup.auto", f"archive {path.name}")
        self.runs.append(path)
        return path

    def _loop(self) -> None:
        next_run = self.next_run_after(self.clock())
        while not self._stop.is_set():
            now = self.clock()
            if now >= next_run:
                try:
                    self.run_once()
                except ServiceError as exc:
                    if self.error_sink is not None:
                        self.error_sink("backup", "critical", exc.message)
                next_run = self.next_run_after(max(now, next_run))
            else:
                self._sleep(min(1.0, next_run - now))
