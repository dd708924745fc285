/** Data table with the five-control pagination strip.
 *
 * Controls mirror the server's ResultPage flags exactly: first/previous
 * are absent on the first page, next/last absent on the final page, and
 * the numbered jump list always reflects the page count.
 */

import { ResultPage } from "./api.js";
import { el } from "./dom.js";

export interface TableOptions {
  columns?: string[];
  onPage?: (pageIndex: number) => void;
  selectable?: boolean;
  caption?: string;
  cell?: (row: Record<string, unknown>, column: string) => string;
}

export function selectedIds(container: HTMLElement): number[] {
  return Array.from(
      container.querySelectorAll<HTMLInputElement>("input[data-row-id]:checked"))
      .map((box) => Number(box.dataset.rowId));
}

export function renderTable(page: ResultPage, options: TableOptions = {}):
    HTMLElement {
  const columns = options.columns ??
      (page.columns.length ? page.columns : Object.keys(page.rows[0] ?? {}));
  const wrap = el("div", { class: "table-wrap" });
  if (options.caption) wrap.append(el("h3", {}, options.caption));
  if (page.note) wrap.append(el("p", { class: "note" }, page.note));

  const head = el("tr", {},
                  ...(options.selectable ? [el("th", {}, "")] : []),
                  ...columns.map((c) => el("th", {}, c)));
  const body = page.rows.map((row) => {
    const record = row as Record<string, unknown>;
    const cells = columns.map((c) => {
      const value = options.cell ? options.cell(record, c) : record[c];
      return el("td", {}, value === null || value === undefined
                          ? "" : String(value));
    });
    if (options.selectable) {
      const id = record[columns[0]] as number;
      cells.unshift(el("td", {}, el("input", {
        type: "checkbox", "data-row-id": String(id),
        "aria-label": `select ${id}`,
      })));
    }
    return el("tr", {}, ...cells);
  });
  wrap.append(el("table", {}, el("thead", {}, head), el("tbody", {}, ...body)));
  wrap.append(el("p", { class: "count" },
                 `${page.total_count} record(s), page ${page.page_index + 1}` +
                 ` of ${Math.max(page.page_count, 1)}`));
  wrap.append(renderControls(page, options.onPage));
  return wrap;
}

export function renderControls(page: ResultPage,
                               onPage?: (index: number) => void): HTMLElement {
  const strip = el("nav", { class: "pagination", "aria-label": "pagination" });
  const go = (index: number) => () => onPage && onPage(index);
  const { controls } = page;
  if (controls.first) {
    strip.append(el("button", { type: "button", "data-nav": "first",
                                onclick: go(0) }, "⇤ first"));
  }
  if (controls.prev) {
    strip.append(el("button", { type: "button", "data-nav": "prev",
                                onclick: go(page.page_index - 1) }, "← prev"));
  }
  for (let i = 0; i < controls.pages; i += 1) {
    strip.append(el("button", {
      type: "button", "data-nav": `page-${i}`,
      ...(i === page.page_index ? { "aria-current": "page" } : {}),
      onclick: go(i),
    }, String(i + 1)));
  }
  if (controls.next) {
    strip.append(el("button", { type: "button", "data-nav": "next",
                                onclick: go(page.page_index + 1) }, "next →"));
  }
  if (controls.last) {
    strip.append(el("button", { type: "button", "data-nav": "last",
                                onclick: go(page.page_count - 1) }, "last ⇥"));
  }
  return strip;
}
