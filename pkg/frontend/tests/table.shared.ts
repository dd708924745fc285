/** Pagination-control rendering assertions, shared by both DOM engines. */

import { expect, test } from "vitest";

import { ResultPage } from "../src/api.js";
import { renderTable, selectedIds } from "../src/table.js";

function pageAt(index: number, pageCount: number, rows = 5): ResultPage {
  return {
    rows: Array.from({ length: rows }, (_, i) => ({ item_id: i + 1,
                                                    name: `row ${i}` })),
    columns: ["item_id", "name"],
    page_index: index,
    page_size: 5,
    total_count: pageCount * 5,
    page_count: pageCount,
    controls: {
      first: index > 0,
      prev: index > 0,
      next: index < pageCount - 1,
      last: index < pageCount - 1,
      pages: pageCount,
    },
    note: null,
  };
}

function navNames(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll("[data-nav]"))
      .map((b) => (b as HTMLElement).dataset.nav ?? "");
}

export function registerTableTests(engine: string): void {
  test(`[${engine}] first page hides first/prev`, () => {
    const table = renderTable(pageAt(0, 3));
    const navs = navNames(table);
    expect(navs).not.toContain("first");
    expect(navs).not.toContain("prev");
    expect(navs).toContain("next");
    expect(navs).toContain("last");
    expect(navs.filter((n) => n.startsWith("page-"))).toHaveLength(3);
  });

  test(`[${engine}] middle page shows all five controls`, () => {
    const navs = navNames(renderTable(pageAt(1, 3)));
    for (const control of ["first", "prev", "next", "last"]) {
      expect(navs).toContain(control);
    }
  });

  test(`[${engine}] last page hides next/last`, () => {
    const navs = navNames(renderTable(pageAt(2, 3)));
    expect(navs).toContain("first");
    expect(navs).toContain("prev");
    expect(navs).not.toContain("next");
    expect(navs).not.toContain("last");
  });

  test(`[${engine}] empty result renders no controls`, () => {
    const table = renderTable({ ...pageAt(0, 0, 0), total_count: 0 });
    expect(navNames(table)).toHaveLength(0);
    expect(table.textContent).toContain("0 record(s)");
  });

  test(`[${engine}] page buttons dispatch the target index`, () => {
    const seen: number[] = [];
    const table = renderTable(pageAt(1, 3), { onPage: (i) => seen.push(i) });
    (table.querySelector("[data-nav=first]") as HTMLButtonElement).click();
    (table.querySelector("[data-nav=prev]") as HTMLButtonElement).click();
    (table.querySelector("[data-nav=next]") as HTMLButtonElement).click();
    (table.querySelector("[data-nav=last]") as HTMLButtonElement).click();
    (table.querySelector("[data-nav=page-0]") as HTMLButtonElement).click();
    expect(seen).toEqual([0, 0, 2, 2, 0]);
  });

  test(`[${engine}] selectable rows report their checked ids`, () => {
    const table = renderTable(pageAt(0, 1), { selectable: true });
    const boxes = table.querySelectorAll<HTMLInputElement>("input[data-row-id]");
    expect(boxes).toHaveLength(5);
    boxes[1].checked = true;
    boxes[3].checked = true;
    expect(selectedIds(table)).toEqual([2, 4]);
  });

  test(`[${engine}] every widget is keyboard reachable`, () => {
    const table = renderTable(pageAt(1, 3), { selectable: true });
    document.body.append(table);
    const widgets = table.querySelectorAll<HTMLElement>("button, input");
    expect(widgets.length).toBeGreaterThan(0);
    for (const widget of widgets) {
      expect(widget.tabIndex).toBeGreaterThanOrEqual(0);
    }
    table.remove();
  });
}
