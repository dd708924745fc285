"""Asset views and mutations with category-driven property validation.

An asset is charged to the affiliation of its location (falling back to
its owner's role, then the university root), and every mutation checks
that attribution against the caller's scope. Category properties can be
required, carry defaults, and be capacity-paired: a numeric value may not
exceed its paired counterpart (license installs vs. seats purchased).
"""

from __future__ import annotations

from .auth import Session
from .core import Level, within_scope
from .csvio import parse_csv_upload
from .errors import ServiceError, conflict, forbidden, invalid_argument, not_found
from .search import ResultPage, SearchService
from .store import Store, Transaction, utcnow_text

ITEM_STATUSES = ("active", "inactive", "stolen", "lent")
ITEM_FIELDS = ("item_description", "code", "serial_number", "cat_id",
               "owner_id", "loc_id", "status", "group_id")
ASSET_CSV_HEADER = ("description", "code", "serial_number", "cat_id",
                    "owner_id", "loc_id", "status", "properties")


class AssetService:
    def __init__(self, store: Store, search: SearchService, *, error_sink=None):
        self.store = store
        self.search = search
        self.error_sink = error_sink

    # -- views ---------------------------------------------------------------

    def list_assets(self, session: Session, *, page_index: int = 0,
                    page_size: int | None = None) -> ResultPage:
        """Default search: every asset visible at the caller's level/scope."""
        plan = self.search.compile_match_all(session, "items")
        return self.search.execute(plan, session, page_index=page_index,
                                   page_size=page_size)

    def get_asset(self, session: Session, item_id: int) -> dict:
        if session.level < Level.L1:
            raise forbidden("viewing assets requires level L1 or above")
        row = self.store.item_row(item_id)
        if row is None or item_id == 0:
            raise not_found(f"asset {item_id}")
        directory = self.store.affiliation_directory()
        attribution = self.store.attribution_of(row["loc_id"], row["owner_id"])
        if not within_scope(session.scope(directory), attribution, directory):
            raise forbidden("asset is outside your scope")
        item = dict(row)
        item["properties"] = {
            p["prop_name"]: p["prop_value"] for p in self.store.query(
                "SELECT ipl.prop_name, ip.prop_value FROM itemproperties ip"
                " JOIN itempropertylist ipl ON ipl.prop_id = ip.prop_id"
                " WHERE ip.item_id = ? ORDER BY ip.item_prop_id", (item_id,))}
        return item

    # -- single add ------------------------------------------------------------

    def add_asset(self, session: Session, fields: dict,
                  properties: dict | None = None) -> dict:
        if session.level < Level.L1:
            raise forbidden("adding assets requires level L1 or above")
        prepared = self._validate_item(session, fields, properties or {})
        with self.store.transaction() as txn:
            item_id = self._insert_item(txn, prepared)
            txn.record_log(session.user_id, item_id, "asset.create",
                           f"asset {prepared['fields'].get('item_description')!r}"
                           f" code {prepared['fields'].get('code')!r}")
        return self.get_asset(session, item_id)

    # -- bulk update -------------------------------------------------------------

    def update_assets(self, session: Session, item_ids: list[int],
                      patch: dict) -> list[dict]:
        """All-or-nothing patch across the given assets."""
        if session.level < Level.L1:
            raise forbidden("updating assets requires level L1 or above")
        if not item_ids:
            raise invalid_argument("no assets selected")
        unknown = sorted(set(patch) - set(ITEM_FIELDS))
        if unknown:
            raise invalid_argument(f"unknown item fields: {', '.join(unknown)}")
        if not patch:
            return [self.get_asset(session, i) for i in item_ids]
        if "status" in patch and patch["status"] not in ITEM_STATUSES:
            raise invalid_argument(
                f"status must be one of {', '.join(ITEM_STATUSES)}", field="status")
        directory = self.store.affiliation_directory()
        scope = session.scope(directory)
        rows = []
        for item_id in item_ids:
            row = self.store.item_row(item_id)
            if row is None or item_id == 0:
                raise not_found(f"asset {item_id}")
            attribution = self.store.attribution_of(row["loc_id"], row["owner_id"])
            if not within_scope(scope, attribution, directory):
                raise forbidden(f"asset {item_id} is outside your scope;"
                                " nothing updated")
            rows.append(row)
        self._check_references(patch)
        if "loc_id" in patch or "owner_id" in patch:
            for row in rows:
                new_attr = self.store.attribution_of(
                    patch.get("loc_id", row["loc_id"]),
                    patch.get("owner_id", row["owner_id"]))
                if not within_scope(scope, new_attr, directory):
                    raise forbidden("patched values land outside your scope;"
                                    " nothing updated")
        if "code" in patch and patch["code"]:
            clash = self.store.query_one(
                "SELECT item_id FROM items WHERE code = ? AND item_id NOT IN"
                f" ({','.join(str(i) for i in item_ids)})", (patch["code"],))
            if clash is not None:
                raise conflict(f"barcode {patch['code']!r} already in use")
        # A category change re-bases properties: the new category's required
        # definitions must be coverable by defaults, old values are dropped.
        rebased = None
        if "cat_id" in patch and any(r["cat_id"] != patch["cat_id"] for r in rows):
            rebased = self._validate_properties(patch["cat_id"], {})
        with self.store.transaction() as txn:
            sets = ", ".join(f"{k} = ?" for k in patch)
            stamp = utcnow_text()
            for row in rows:
                item_id = row["item_id"]
                txn.execute(
                    f"UPDATE items SET {sets}, date_modified = ? WHERE item_id = ?",
                    (*patch.values(), stamp, item_id))
                if rebased is not None and row["cat_id"] != patch["cat_id"]:
                    txn.execute("DELETE FROM itemproperties WHERE item_id = ?",
                                (item_id,))
                    for prop_id, value in rebased:
                        txn.execute(
                            "INSERT INTO itemproperties (item_id, prop_id,"
                            " prop_value) VALUES (?,?,?)", (item_id, prop_id, value))
                txn.record_log(session.user_id, item_id, "asset.update",
                               ", ".join(f"{k}={v!r}" for k, v in patch.items()))
        return [self.get_asset(session, i) for i in item_ids]

    # -- bulk add -------------------------------------------------------------------

    def bulk_add_assets(self, session: Session, data: bytes) -> dict:
        """Insert every CSV row (with its properties) or none."""
        if session.level < Level.L1:
            raise forbidden("bulk adding assets requires level L1 or above")
        try:
            rows = parse_csv_upload(data, ASSET_CSV_HEADER, min_columns=7)
        except ServiceError as exc:
            if exc.code == "invalid-input" and self.error_sink is not None:
                self.error_sink("import.assets", "warning", exc.message)
            raise
        if not rows:
            raise ServiceError("invalid-input", "CSV contains no data rows")
        prepared = []
        codes_in_file = set()
        for row in rows:
            line = row["_line"]
            try:
                fields = {
                    "item_description": row.get("description") or "",
                    "code": row.get("code") or "",
                    "serial_number": row.get("serial_number") or "",
                    "cat_id": int(row["cat_id"] or ""),
                    "owner_id": int(row["owner_id"] or "0"),
                    "loc_id": int(row["loc_id"] or "0"),
                    "status": row.get("status") or "active",
                }
                properties = _parse_properties(row.get("properties"))
                item = self._validate_item(session, fields, properties)
            except (ValueError, TypeError):
                self._bulk_reject(f"line {line}: cat_id, owner_id and loc_id"
                                  " must be numbers", line)
            except ServiceError as exc:
                if exc.code in ("forbidden", "forbidden-row"):
                    raise ServiceError("forbidden-row",
                                       f"line {line}: {exc.message}",
                                       detail={"line": line}) from None
                self._bulk_reject(f"line {line}: {exc.message}", line)
            code = item["fields"]["code"]
            if code:
                if code in codes_in_file:
                    self._bulk_reject(f"line {line}: duplicate barcode {code!r}"
                                      " within the file", line)
                codes_in_file.add(code)
            prepared.append(item)
        with self.store.transaction() as txn:
            item_ids = [self._insert_item(txn, p) for p in prepared]
            txn.record_log(session.user_id, None, "asset.import",
                           f"imported {len(item_ids)} assets")
        return {"inserted": len(item_ids), "item_ids": item_ids}

    def _bulk_reject(self, message: str, line: int):
        if self.error_sink is not None:
            self.error_sink("import.assets", "warning", message)
        raise ServiceError("invalid-input", message, detail={"line": line})

    # -- grouping -----------------------------------------------------------------------

    def group_assets(self, session: Session, item_ids: list[int]) -> dict:
        """Stamp a fresh group id on every selected asset, atomically."""
        if session.level < Level.L1:
            raise forbidden("grouping assets requires level L1 or above")
        if not item_ids:
            raise invalid_argument("no assets selected")
        directory = self.store.affiliation_directory()
        scope = session.scope(directory)
        for item_id in item_ids:
            row = self.store.item_row(item_id)
            if row is None or item_id == 0:
                raise not_found(f"asset {item_id}")
            attribution = self.store.attribution_of(row["loc_id"], row["owner_id"])
            if not within_scope(scope, attribution, directory):
                raise forbidden(f"asset {item_id} is outside your scope;"
                                " no group created")
        with self.store.transaction() as txn:
            top = txn.query_one("SELECT MAX(group_id) AS g FROM items")["g"] or 0
            group_id = top + 1
            stamp = utcnow_text()
            for item_id in item_ids:
                txn.execute("UPDATE items SET group_id = ?, date_modified = ?"
                            " WHERE item_id = ?", (group_id, stamp, item_id))
                txn.record_log(session.user_id, item_id, "asset.group",
                               f"grouped into {group_id}")
        return {"group_id": group_id, "item_ids": list(item_ids)}

    # -- validation helpers -----------------------------------------------------

    def _validate_item(self, session: Session, fields: dict, properties: dict) -> dict:
        clean = {}
        for key in ITEM_FIELDS:
            if key in fields and fields[key] is not None:
                clean[key] = fields[key]
        status = clean.setdefault("status", "active")
        if status not in ITEM_STATUSES:
            raise invalid_argument(
                f"status must be one of {', '.join(ITEM_STATUSES)}", field="status")
        clean.setdefault("cat_id", 0)
        clean.setdefault("owner_id", 0)
        clean.setdefault("loc_id", 0)
        clean.setdefault("code", "")
        self._check_references(clean)
        directory = self.store.affiliation_directory()
        attribution = self.store.attribution_of(clean["loc_id"], clean["owner_id"])
        if not within_scope(session.scope(directory), attribution, directory):
            raise forbidden("asset data is outside your scope; nothing written")
        if clean["code"]:
            clash = self.store.query_one("SELECT 1 FROM items WHERE code = ?",
                                         (clean["code"],))
            if clash is not None:
                raise conflict(f"barcode {clean['code']!r} already in use")
        values = self._validate_properties(clean["cat_id"], properties)
        return {"fields": clean, "properties": values}

    def _check_references(self, fields: dict) -> None:
        # 0 is the N/A sentinel everywhere; anything else must resolve.
        cat_id = fields.get("cat_id")
        if cat_id is not None and self.store.query_one(
                "SELECT 1 FROM categories WHERE cat_id = ?", (cat_id,)) is None:
            raise invalid_argument(f"unknown category {cat_id}", field="cat_id")
        loc_id = fields.get("loc_id")
        if loc_id not in (None, 0) and self.store.query_one(
                "SELECT 1 FROM locations WHERE loc_id = ?", (loc_id,)) is None:
            raise invalid_argument(f"unknown location {loc_id}", field="loc_id")
        owner_id = fields.get("owner_id")
        if owner_id not in (None, 0) and self.store.query_one(
                "SELECT 1 FROM users WHERE user_id = ?", (owner_id,)) is None:
            raise invalid_argument(f"unknown owner {owner_id}", field="owner_id")

    def _validate_properties(self, cat_id: int, provided: dict) -> list[tuple[int, str]]:
        """Resolve property values against the category's definitions.

        Returns (prop_id, value) pairs to persist: provided values plus
        defaults, with required and capacity-pair rules applied.
        """
        defs = {d["prop_name"]: d for d in self.store.query(
            "SELECT * FROM itempropertylist WHERE cat_id = ?", (cat_id,))}
        by_id = {d["prop_id"]: d for d in defs.values()}
        unknown = sorted(set(provided) - set(defs))
        if unknown:
            raise ServiceError(
                "invalid-property",
                f"properties not in this category: {', '.join(unknown)}")
        values: dict[int, str] = {}
        for name, d in defs.items():
            if name in provided and str(provided[name]).strip() != "":
                values[d["prop_id"]] = str(provided[name]).strip()
            elif d["default_value"] is not None:
                values[d["prop_id"]] = d["default_value"]
            elif d["required"]:
                raise ServiceError("invalid-input",
                                   f"required property {name!r} is missing",
                                   field=name)
        for d in defs.values():
            cap_of = d["numeric_cap_of"]
            if cap_of is None or d["prop_id"] not in values:
                continue
            capped = _as_number(values[d["prop_id"]], d["prop_name"])
            cap_def = by_id.get(cap_of)
            if cap_def is None or cap_of not in values:
                raise ServiceError("invalid-input",
                                   f"property {d['prop_name']!r} needs its paired"
                                   " capacity value", field=d["prop_name"])
            allowed = _as_number(values[cap_of], cap_def["prop_name"])
            if capped > allowed:
                raise ServiceError(
                    "invalid-input",
                    f"{d['prop_name']} ({capped}) exceeds {cap_def['prop_name']}"
                    f" ({allowed})", field=d["prop_name"])
        return sorted(values.items())

    def _insert_item(self, txn: Transaction, prepared: dict) -> int:
        fields = dict(prepared["fields"])
        fields["date_modified"] = utcnow_text()
        cols = ", ".join(fields)
        marks = ", ".join("?" * len(fields))
        cur = txn.execute(f"INSERT INTO items ({cols}) VALUES ({marks})",
                          tuple(fields.values()))
        item_id = cur.lastrowid
        for prop_id, value in prepared["properties"]:
            txn.execute("INSERT INTO itemproperties (item_id, prop_id, prop_value)"
                        " VALUES (?,?,?)", (item_id, prop_id, value))
        return item_id


def _parse_properties(raw: str | None) -> dict:
    """Parse 'name=value;name=value' pairs from the CSV properties column."""
    result: dict[str, str] = {}
    if not raw:
        return result
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ServiceError("invalid-input",
                               f"property {chunk!r} is not name=value")
        name, _, value = chunk.partition("=")
        result[name.strip()] = value.strip()
    return result


def _as_number(value: str, prop_name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ServiceError("invalid-input",
                           f"property {prop_name!r} must be numeric, got {value!r}",
                           field=prop_name) from None
