#!/usr/bin/env python3
"""Run the inventory service with its HTTP API (and the web UI when built).

Examples:
    python scripts/run_server.py --db ./uuis.db --port 8500
    python scripts/run_server.py --config uuis.ini
    UUIS_SERVER_PORT=9000 python scripts/run_server.py
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import uvicorn

from uuis import InventoryService, load_config
from uuis.gateway import create_app


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="INI config file (see uuis.config)")
    parser.add_argument("--db", help="store path (overrides config)")
    parser.add_argument("--host", help="listen address")
    parser.add_argument("--port", type=int, help="listen port")
    parser.add_argument("--backup-dir", help="directory for backup archives")
    parser.add_argument("--daily-at", help="HH:MM (UTC) daily automatic backup")
    parser.add_argument("--ui", default=str(Path(__file__).resolve().parent.parent
                                            / "frontend" / "dist"),
                        help="directory with the built web UI (optional)")
    args = parser.parse_args()

    config = load_config(args.config)
    if args.db:
        config.store_path = args.db
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.backup_dir:
        config.backup_dir = args.backup_dir
    if args.daily_at:
        config.backup_daily_at = args.daily_at

    service = InventoryService(config)
    service.start_scheduler()
    ui_dir = Path(args.ui) if args.ui else None
    app = create_app(service, ui_dir=ui_dir if ui_dir and ui_dir.is_dir() else None)
    print(f"store: {config.store_path}; UI: "
          f"{ui_dir if ui_dir and ui_dir.is_dir() else 'not built'}")
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        service.close()


if __name__ == "__main__":
    main()
