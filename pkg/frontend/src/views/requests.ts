/** Request workflows: submit, my requests with cancel, pending queue with
 * approve (fulfillment form) and reject (reason). */

import { ApiFailure, Catalog, RequestRow } from "../api.js";
import { clear, el, errorBox, noteBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";
import { renderTable } from "../table.js";
import { requiresIdentifier, validateRequestForm } from "../validate.js";

export function renderRequests(root: HTMLElement, state: AppState,
                               catalog: Catalog): void {
  clear(root);
  const mine = el("div", {});
  const pending = el("div", {});
  root.append(el("h2", {}, "Requests"), submitForm(), mine, pending);
  void loadMine();
  if ((state.session?.level ?? 0) >= 1) void loadPending(0);

  function typeById(id: number) {
    return catalog.request_types.find((t) => t.req_type_id === id);
  }

  function submitForm(): HTMLElement {
    const typeSelect = el("select", { name: "request_type" },
        ...catalog.request_types.map((t) =>
            el("option", { value: String(t.req_type_id) },
               `${t.req_type_id}: ${t.req_type_code}`)));
    const identifier = el("input", { name: "identifier",
                                     placeholder: "barcode or serial" });
    const identifierLabel = el("label", {}, "Asset identifier", identifier);
    const description = el("textarea", { name: "description", maxlength: "500" });
    const hint = el("p", { class: "hint" });
    const box = el("div", { class: "feedback" });

    const syncHint = () => {
      const t = typeById(Number(typeSelect.value));
      hint.textContent = t?.description ?? "";
      identifierLabel.classList.toggle(
          "required", requiresIdentifier(Number(typeSelect.value)));
    };
    typeSelect.addEventListener("change", syncHint);

    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        const typeId = Number(typeSelect.value);
        const problem = validateRequestForm(identifier.value, description.value,
                                            requiresIdentifier(typeId));
        if (problem) {
          box.append(errorBox(problem.message, problem.field));
          return;
        }
        void withFormLock(form, async () => {
          try {
            const created = await state.api.submitRequest(
                typeId, identifier.value.trim() || null, description.value);
            box.append(noteBox(`Request ${created.req_id} submitted.`));
            identifier.value = "";
            description.value = "";
            void loadMine();
          } catch (failure) {
            if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
              box.append(errorBox(failure.error.message, failure.error.field));
            }
          }
        });
      },
    },
        el("h3", {}, "Submit a request"),
        el("label", {}, "Type", typeSelect),
        identifierLabel,
        el("label", {}, "Description", description),
        hint,
        el("button", { type: "submit" }, "Submit"), box);
    syncHint();
    return form;
  }

  async function loadMine(page = 0): Promise<void> {
    clear(mine);
    try {
      const result = await state.api.myRequests(page);
      mine.append(renderTable(result, {
        caption: "My requests",
        columns: ["req_id", "request_type", "item_id", "description",
                  "status", "date_submitted"],
        onPage: (index) => void loadMine(index),
      }));
      for (const row of result.rows) {
        if (row.status !== "pending") continue;
        mine.append(el("button", {
          type: "button", "data-cancel": String(row.req_id),
          onclick: () => void cancel(row.req_id),
        }, `Cancel request ${row.req_id}`));
      }
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        mine.append(errorBox(failure.error.message));
      }
    }
  }

  async function cancel(reqId: number): Promise<void> {
    try {
      await state.api.cancelRequest(reqId);
      void loadMine();
    } catch (failure) {
      if (failure instanceof ApiFailure) {
        mine.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }

  async function loadPending(page: number): Promise<void> {
    clear(pending);
    try {
      const result = await state.api.pendingRequests(page);
      pending.append(renderTable(result, {
        caption: "Pending requests from users you administer",
        columns: ["req_id", "requester", "request_type", "item_id",
                  "description", "date_submitted"],
        onPage: (index) => void loadPending(index),
      }));
      for (const row of result.rows) {
        pending.append(decisionForm(row));
      }
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        pending.append(errorBox(failure.error.message));
      }
    }
  }

  function decisionForm(row: RequestRow): HTMLElement {
    const needsLocation = row.request_type === 4;     // moving
    const location = el("select", { name: "loc_id" },
        ...catalog.locations.map((l) =>
            el("option", { value: String(l.loc_id) },
               `${l.loc_id}: ${l.loc_code}`)));
    const reason = el("input", { name: "reason", placeholder: "reason" });
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "decision", "data-req": String(row.req_id),
      onsubmit: (event: Event) => event.preventDefault(),
    },
        el("strong", {}, `#${row.req_id}`),
        needsLocation ? el("label", {}, "Destination", location) : null,
        el("button", {
          type: "button", "data-approve": String(row.req_id),
          onclick: () => void decide("approve"),
        }, "Approve"),
        el("label", {}, "Reason", reason),
        el("button", {
          type: "button", "data-reject": String(row.req_id),
          onclick: () => void decide("reject"),
        }, "Reject"),
        box);

    async function decide(action: "approve" | "reject"): Promise<void> {
      clear(box);
      try {
        if (action === "approve") {
          const fulfillment = needsLocation
              ? { loc_id: Number(location.value) } : {};
          await state.api.approveRequest(row.req_id, fulfillment);
        } else {
          await state.api.rejectRequest(row.req_id, reason.value);
        }
        void loadPending(0);
      } catch (failure) {
        if (failure instanceof ApiFailure) {
          // validation failures keep the row; show the field error inline
          box.append(errorBox(failure.error.message,
                              failure.error.field ?? failure.error.code));
        }
      }
    }
    return form;
  }
}
