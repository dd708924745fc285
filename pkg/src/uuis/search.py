"""Search capture, scoped query compilation, execution, and export.

Basic queries become a disjunction of substring matches over an entity's
registered text columns (for assets, property values too). Advanced
queries are an expression tree over typed field predicates. Compilation
conjoins the session's affiliation-scope predicate; nothing the caller
puts in the query can widen it. Asset listing is just a match-all search,
so every view shares one scoping path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .auth import Session
from .core import SCOPE_UNIVERSITY, Level
from .errors import ServiceError, forbidden
from .store import Store

BASIC_QUERY_MAX = 30
VALUE_MAX = 30
MAX_PARAMETERS = 20
DEFAULT_PAGE_SIZE = 25
OPERATORS = ("eq", "neq", "lt", "gt", "contains")


@dataclass(frozen=True)
class FieldSpec:
    column: str
    numeric: bool = False


@dataclass(frozen=True)
class EntitySpec:
    table: str
    pk: str
    min_level: Level
    text_columns: tuple[str, ...]
    fields: dict[str, FieldSpec]
    base_sql: str | None = None
    property_text: bool = False


# Fixed registry of searchable entities and fields. The sentinel item row 0
# is never part of a result.
ENTITIES: dict[str, EntitySpec] = {
    "items": EntitySpec(
        table="items", pk="item_id", min_level=Level.L1,
        text_columns=("item_description", "code", "serial_number"),
        fields={
            "item_id": FieldSpec("item_id", numeric=True),
            "description": FieldSpec("item_description"),
            "code": FieldSpec("code"),
            "serial_number": FieldSpec("serial_number"),
            "cat_id": FieldSpec("cat_id", numeric=True),
            "owner_id": FieldSpec("owner_id", numeric=True),
            "loc_id": FieldSpec("loc_id", numeric=True),
            "group_id": FieldSpec("group_id", numeric=True),
            "status": FieldSpec("status"),
        },
        base_sql="items.item_id <> 0",
        property_text=True),
    "users": EntitySpec(
        table="users", pk="user_id", min_level=Level.L1,
        text_columns=("user_code", "last_name", "first_name"),
        fields={
            "user_id": FieldSpec("user_id", numeric=True),
            "user_code": FieldSpec("user_code"),
            "last_name": FieldSpec("last_name"),
            "first_name": FieldSpec("first_name"),
        }),
    "requests": EntitySpec(
        table="requests", pk="req_id", min_level=Level.L0,
        text_columns=("description", "status"),
        fields={
            "req_id": FieldSpec("req_id", numeric=True),
            "requester": FieldSpec("requester", numeric=True),
            "request_type": FieldSpec("request_type", numeric=True),
            "item_id": FieldSpec("item_id", numeric=True),
            "description": FieldSpec("description"),
            "status": FieldSpec("status"),
        }),
    "logs": EntitySpec(
        table="logs", pk="log_id", min_level=Level.L1,
        text_columns=("event_type", "content"),
        fields={
            "log_id": FieldSpec("log_id", numeric=True),
            "user_id": FieldSpec("user_id", numeric=True),
            "item_id": FieldSpec("item_id", numeric=True),
            "event_type": FieldSpec("event_type"),
            "content": FieldSpec("content"),
        }),
}

# Attribution of an asset row: location affiliation, else the owner's first
# role affiliation, else the university root. Mirrors Store.attribution_of.
_ITEM_ATTR_SQL = """COALESCE(
  (SELECT l.affln_id FROM locations l WHERE l.loc_id = {alias}.loc_id),
  (SELECT ur.affln_id FROM userroles ur WHERE ur.user_id = {alias}.owner_id
     ORDER BY ur.user_role_id LIMIT 1),
  0)"""

_LOG_ITEM_ATTR_SQL = """COALESCE(
  (SELECT l.affln_id FROM locations l JOIN items i ON l.loc_id = i.loc_id
     WHERE i.item_id = logs.item_id),
  (SELECT ur.affln_id FROM userroles ur JOIN items i ON ur.user_id = i.owner_id
     WHERE i.item_id = logs.item_id ORDER BY ur.user_role_id LIMIT 1),
  (SELECT 0 FROM items i WHERE i.item_id = logs.item_id))"""


@dataclass(frozen=True)
class BasicQuery:
    text: str
    truncated: bool = False


@dataclass(frozen=True)
class SearchParameter:
    field: str
    operator: str
    value: str


@dataclass(frozen=True)
class AdvancedQuery:
    parameters: tuple[SearchParameter, ...]
    expression: object                    # int index or (op, left, right)
    dropped_parameters: int = 0


@dataclass
class QueryPlan:
    """Compiled, scope-conjoined query bound to the compiling session."""

    target: str
    sql: str
    params: tuple
    description: str
    session_token: str
    scope_note: str


@dataclass
class ResultPage:
    rows: list[dict]
    page_index: int
    page_size: int
    total_count: int
    page_count: int
    controls: dict = field(default_factory=dict)
    note: str | None = None
    columns: list[str] = field(default_factory=list)


def make_controls(page_index: int, page_count: int) -> dict:
    return {
        "first": page_index > 0,
        "prev": page_index > 0,
        "next": page_index < page_count - 1,
        "last": page_index < page_count - 1,
        "pages": page_count,
    }


def paginate(rows: list[dict], page_index: int, page_size: int,
             columns: list[str] | None = None) -> ResultPage:
    """Slice rows into a page, clamping an out-of-range index to the end."""
    total = len(rows)
    page_count = math.ceil(total / page_size) if total else 0
    note = None
    if page_index < 0:
        page_index = 0
    last = max(page_count - 1, 0)
    if page_index > last:
        note = f"page {page_index} is past the end; showing page {last}"
        page_index = last
    start = page_index * page_size
    return ResultPage(rows=rows[start:start + page_size], page_index=page_index,
                      page_size=page_size, total_count=total, page_count=page_count,
                      controls=make_controls(page_index, page_count), note=note,
                      columns=columns or [])


def _like_pattern(value: str) -> str:
    escaped = (value.lower().replace("\\", "\\\\")
               .replace("%", "\\%").replace("_", "\\_"))
    return f"%{escaped}%"


class SearchService:
    def __init__(self, store: Store, *, page_size: int = DEFAULT_PAGE_SIZE):
        self.store = store
        self.page_size = page_size

    # -- capture -------------------------------------------------------------

    def capture_basic(self, raw: str, session: Session) -> tuple[BasicQuery, dict]:
        """Record a basic search string with the caller's context.

        Strings longer than 30 characters are truncated; empty input is an
        error. Already-truncated input passes through unchanged.
        """
        text = (raw or "").strip()
        if not text:
            raise ServiceError("empty-query", "search string is empty", field="text")
        truncated = len(text) > BASIC_QUERY_MAX
        query = BasicQuery(text=text[:BASIC_QUERY_MAX], truncated=truncated)
        directory = self.store.affiliation_directory()
        context = {
            "level": int(session.level),
            "affiliation": session.role.affln_id,
            "scope": session.scope(directory).describe(directory),
        }
        return query, context

    def capture_advanced(self, params: list[dict], *, connectives: list[str] | None = None,
                         expression=None, target: str = "items") -> AdvancedQuery:
        """Assemble parameters plus connectives into one unambiguous query.

        Accepts either per-step connectives (uniform AND/OR; a mix needs an
        explicit expression tree, and the caller is asked to refine) or a
        fully parenthesized tree. Only the first 20 parameters are kept; the
        overflow count is reported on the query.
        """
        spec = self._entity(target)
        dropped = max(0, len(params) - MAX_PARAMETERS)
        params = params[:MAX_PARAMETERS]
        if connectives is not None:
            connectives = connectives[:max(0, len(params) - 1)]
        captured = []
        for i, p in enumerate(params):
            fld, op, value = p.get("field"), p.get("operator"), p.get("value")
            if fld not in spec.fields:
                raise ServiceError("invalid-field",
                                   f"unknown search field {fld!r} for {target}",
                                   field=f"parameters[{i}].field")
            if op not in OPERATORS:
                raise ServiceError("invalid-field", f"unknown operator {op!r}",
                                   field=f"parameters[{i}].operator")
            value = (value or "").strip()
            if not value:
                raise ServiceError("empty-query",
                                   f"parameter {i} has an empty value",
                                   field=f"parameters[{i}].value")
            captured.append(SearchParameter(fld, op, value[:VALUE_MAX]))
        if not captured:
            raise ServiceError("empty-query", "no search parameters given")

        if expression is not None:
            tree = self._validate_tree(expression, len(captured))
        elif len(captured) == 1:
            tree = 0
        else:
            ops = [c.upper() for c in (connectives or [])]
            if len(ops) != len(captured) - 1 or any(o not in ("AND", "OR") for o in ops):
                raise ServiceError("invalid-argument",
                                   "one AND/OR connective is required between parameters")
            if len(set(ops)) > 1:
                raise ServiceError(
                    "ambiguous-expression",
                    "mixed AND/OR needs explicit grouping; resubmit with an"
                    " expression tree")
            tree = 0
            for i in range(1, len(captured)):
                tree = (ops[i - 1], tree, i)
        return AdvancedQuery(parameters=tuple(captured), expression=tree,
                             dropped_parameters=dropped)

    def _validate_tree(self, node, n_params: int, seen: set | None = None):
        top = seen is None
        if seen is None:
            seen = set()
        if isinstance(node, int) and not isinstance(node, bool):
            if not (0 <= node < n_params):
                raise ServiceError("invalid-argument",
                                   f"expression references parameter {node}")
            if node in seen:
                raise ServiceError("invalid-argument",
                                   f"parameter {node} referenced twice")
            seen.add(node)
            result = node
        elif isinstance(node, (list, tuple)) and len(node) == 3 \
                and str(node[0]).upper() in ("AND", "OR"):
            result = (str(node[0]).upper(),
                      self._validate_tree(node[1], n_params, seen),
                      self._validate_tree(node[2], n_params, seen))
        else:
            raise ServiceError("invalid-argument",
                               "expression nodes must be an index or"
                               " [AND|OR, left, right]")
        if top and len(seen) != n_params:
            missing = sorted(set(range(n_params)) - seen)
            raise ServiceError("invalid-argument",
                               f"expression must use every parameter; missing {missing}")
        return result

    # -- compile -------------------------------------------------------------

    def compile(self, query: BasicQuery | AdvancedQuery, session: Session,
                target: str) -> QueryPlan:
        spec = self._entity(target)
        if session.level < spec.min_level:
            raise forbidden(f"searching {target} requires level"
                            f" L{int(spec.min_level)} or above")
        if isinstance(query, BasicQuery):
            pred_sql, params, desc = self._basic_predicate(spec, query)
        else:
            pred_sql, params, desc = self._tree_sql(spec, query.parameters,
                                                    query.expression)
        return self._plan(spec, target, session, pred_sql, params, desc)

    def compile_match_all(self, session: Session, target: str) -> QueryPlan:
        spec = self._entity(target)
        if session.level < spec.min_level:
            raise forbidden(f"viewing {target} requires level"
                            f" L{int(spec.min_level)} or above")
        return self._plan(spec, target, session, "1=1", [], "all records")

    def _entity(self, target: str) -> EntitySpec:
        if target not in ENTITIES:
            raise ServiceError("invalid-argument", f"unknown search target {target!r}")
        return ENTITIES[target]

    def _basic_predicate(self, spec: EntitySpec, query: BasicQuery):
        pattern = _like_pattern(query.text)
        clauses, params = [], []
        for col in spec.text_columns:
            clauses.append(
                f"lower(CAST({spec.table}.{col} AS TEXT)) LIKE ? ESCAPE '\\'")
            params.append(pattern)
        if spec.property_text:
            clauses.append(
                "EXISTS (SELECT 1 FROM itemproperties ip WHERE ip.item_id ="
                f" {spec.table}.item_id AND lower(ip.prop_value) LIKE ? ESCAPE '\\')")
            params.append(pattern)
        return "(" + " OR ".join(clauses) + ")", params, f"text contains {query.text!r}"

    def _param_sql(self, spec: EntitySpec, p: SearchParameter):
        col = f"{spec.table}.{spec.fields[p.field].column}"
        numeric = spec.fields[p.field].numeric
        if p.operator == "contains":
            return (f"lower(CAST({col} AS TEXT)) LIKE ? ESCAPE '\\'",
                    [_like_pattern(p.value)])
        if numeric:
            try:
                n = int(p.value)
            except ValueError:
                # Unparseable numbers match nothing, except neq which keeps
                # every non-null row.
                if p.operator == "neq":
                    return f"{col} IS NOT NULL", []
                return "0=1", []
            if p.operator == "eq":
                return f"{col} = ?", [n]
            if p.operator == "neq":
                return f"({col} IS NOT NULL AND {col} <> ?)", [n]
            return f"{col} {'<' if p.operator == 'lt' else '>'} ?", [n]
        if p.operator == "eq":
            return f"{col} = ?", [p.value]
        if p.operator == "neq":
            return f"({col} IS NOT NULL AND {col} <> ?)", [p.value]
        return f"{col} {'<' if p.operator == 'lt' else '>'} ?", [p.value]

    def _tree_sql(self, spec: EntitySpec, params: tuple[SearchParameter, ...], node):
        if isinstance(node, int):
            p = params[node]
            sql, args = self._param_sql(spec, p)
            return sql, args, f"{p.field} {p.operator} {p.value!r}"
        op, left, right = node
        lsql, largs, ldesc = self._tree_sql(spec, params, left)
        rsql, rargs, rdesc = self._tree_sql(spec, params, right)
        return (f"({lsql} {op} {rsql})", largs + rargs, f"({ldesc} {op} {rdesc})")

    def _scope_sql(self, spec: EntitySpec, session: Session):
        directory = self.store.affiliation_directory()
        scope = session.scope(directory)
        if scope.kind == SCOPE_UNIVERSITY:
            return "1=1", [], "university-wide"
        ids = sorted(scope.member_ids(directory))
        id_list = ",".join(str(i) for i in ids)
        note = scope.describe(directory)
        if spec.table == "items":
            attr = _ITEM_ATTR_SQL.format(alias="items")
            return f"{attr} IN ({id_list})", [], note
        if spec.table == "users":
            return (f"EXISTS (SELECT 1 FROM userroles ur WHERE ur.user_id ="
                    f" users.user_id AND ur.affln_id IN ({id_list}))", [], note)
        if spec.table == "requests":
            if session.level == Level.L0:
                return "requests.requester = ?", [session.user_id], "own requests"
            return (f"(requests.requester = ? OR (SELECT ur.affln_id FROM userroles"
                    f" ur WHERE ur.user_id = requests.requester ORDER BY"
                    f" ur.user_role_id LIMIT 1) IN ({id_list}))",
                    [session.user_id], note)
        # logs: actor in scope, or the referenced item charged to the scope
        return (f"(EXISTS (SELECT 1 FROM userroles ur WHERE ur.user_id ="
                f" logs.user_id AND ur.affln_id IN ({id_list}))"
                f" OR {_LOG_ITEM_ATTR_SQL} IN ({id_list}))", [], note)

    def _plan(self, spec: EntitySpec, target: str, session: Session,
              pred_sql: str, pred_params: list, desc: str) -> QueryPlan:
        scope_sql, scope_params, scope_note = self._scope_sql(spec, session)
        where = [pred_sql, f"({scope_sql})"]
        if spec.base_sql:
            where.insert(0, f"({spec.base_sql})")
        sql = (f"SELECT * FROM {spec.table} WHERE "
               + " AND ".join(where) + f" ORDER BY {spec.table}.{spec.pk}")
        description = f"{target}: {desc}; scope: {scope_note}"
        return QueryPlan(target=target, sql=sql,
                         params=tuple(pred_params + scope_params),
                         description=description, session_token=session.token,
                         scope_note=scope_note)

    # -- execute / export ------------------------------------------------------

    def execute(self, plan: QueryPlan, session: Session, *, page_index: int = 0,
                page_size: int | None = None) -> ResultPage:
        self._check_plan(plan, session)
        rows, columns = self._fetch(plan)
        return paginate(rows, page_index, page_size or self.page_size, columns)

    def export(self, plan: QueryPlan, session: Session, fmt: str) -> tuple[str, str]:
        """Render the full result set as ('csv'|'printable', document)."""
        from . import render
        self._check_plan(plan, session)
        rows, columns = self._fetch(plan)
        if fmt == "csv":
            return "csv", render.to_csv(columns, rows)
        if fmt == "printable":
            return "printable", render.to_printable(
                f"Search results: {plan.target}", plan.description, columns, rows)
        raise ServiceError("bad-request", f"unsupported export format {fmt!r}")

    def _check_plan(self, plan: QueryPlan, session: Session) -> None:
        if plan.session_token != session.token:
            raise forbidden("plan was compiled for a different session")

    def _fetch(self, plan: QueryPlan):
        with self.store.transaction(system=True) as txn:
            cur = txn.execute(plan.sql, plan.params)
            columns = [d[0] for d in cur.description]
            rows = [dict(r) for r in cur.fetchall()]
        return rows, columns
