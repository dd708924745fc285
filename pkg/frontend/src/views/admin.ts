/** University management: org structure, locations, user import, role
 * updates, and the confirm-gated manual backup. */

import { ApiFailure, Catalog } from "../api.js";
import { clear, el, errorBox, noteBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";
import { validateUpload } from "../validate.js";

export function renderAdmin(root: HTMLElement, state: AppState,
                            catalog: Catalog): void {
  clear(root);
  const level = state.session?.level ?? 0;
  root.append(el("h2", {}, "University management"));
  const grid = el("div", { class: "cards" });
  if (level >= 2) grid.append(departmentForm());
  if (level >= 3) grid.append(facultyForm());
  if (level >= 2) grid.append(locationForm());
  grid.append(importUsersForm(), roleForm(), backupCard());
  root.append(grid);

  function feedbackify(work: (box: HTMLElement) => Promise<void>,
                       box: HTMLElement, form: HTMLFormElement) {
    return (event: Event) => {
      event.preventDefault();
      clear(box);
      void withFormLock(form, async () => {
        try {
          await work(box);
        } catch (failure) {
          if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
            box.append(errorBox(failure.error.message,
                                failure.error.field ?? failure.error.code));
          }
        }
      });
    };
  }

  function departmentForm(): HTMLElement {
    const name = el("input", { name: "name", required: true });
    const code = el("input", { name: "code", required: true });
    const faculty = el("select", { name: "faculty_id" },
        ...catalog.affiliations.filter((a) => a.kind === "faculty").map((a) =>
            el("option", { value: String(a.affln_id) }, a.name)));
    const box = el("div", { class: "feedback" });
    const form = el("form", { class: "card" },
        el("h3", {}, "Create department"),
        el("label", {}, "Name", name),
        el("label", {}, "Code", code),
        el("label", {}, "Faculty", faculty),
        el("button", { type: "submit" }, "Create"), box);
    form.addEventListener("submit", feedbackify(async (out) => {
      const dept = await state.api.createDepartment(
          name.value, code.value, Number(faculty.value));
      out.append(noteBox(`Department ${dept.name} created (id ${dept.affln_id}).`));
    }, box, form));
    return form;
  }

  function facultyForm(): HTMLElement {
    const name = el("input", { name: "name", required: true });
    const code = el("input", { name: "code", required: true });
    const box = el("div", { class: "feedback" });
    const form = el("form", { class: "card" },
        el("h3", {}, "Create faculty"),
        el("label", {}, "Name", name),
        el("label", {}, "Code", code),
        el("button", { type: "submit" }, "Create"), box);
    form.addEventListener("submit", feedbackify(async (out) => {
      const faculty = await state.api.createFaculty(name.value, code.value);
      out.append(noteBox(`Faculty ${faculty.name} created.`));
    }, box, form));
    return form;
  }

  function locationForm(): HTMLElement {
    const locCode = el("input", { name: "loc_code", required: true });
    const locName = el("input", { name: "loc_name", required: true });
    const building = el("select", { name: "bldg_id" },
        ...catalog.buildings.map((b) =>
            el("option", { value: String(b.bldg_id) },
               `${b.bldg_id}: ${b.bldg_code}`)));
    const affln = el("select", { name: "affln_id" },
        ...catalog.affiliations.map((a) =>
            el("option", { value: String(a.affln_id) },
               `${a.affln_id}: ${a.name}`)));
    const box = el("div", { class: "feedback" });
    const form = el("form", { class: "card" },
        el("h3", {}, "Add location"),
        el("label", {}, "Code", locCode),
        el("label", {}, "Name", locName),
        el("label", {}, "Building", building),
        el("label", {}, "Affiliation", affln),
        el("button", { type: "submit" }, "Add"), box);
    form.addEventListener("submit", feedbackify(async (out) => {
      const loc = await state.api.addLocation({
        loc_code: locCode.value, loc_name: locName.value,
        bldg_id: Number(building.value), affln_id: Number(affln.value),
      });
      out.append(noteBox(`Location ${loc.loc_code} added (id ${loc.loc_id}).`));
    }, box, form));
    return form;
  }

  function importUsersForm(): HTMLElement {
    const file = el("input", { type: "file", name: "csv", accept: ".csv" });
    const box = el("div", { class: "feedback" });
    const form = el("form", { class: "card" },
        el("h3", {}, "Bulk import users"),
        el("p", { class: "hint" },
           "Header: user_code,last_name,first_name,password,title_id," +
           "affln_id,email"),
        el("label", {}, "CSV file", file),
        el("button", { type: "submit" }, "Import"), box);
    form.addEventListener("submit", feedbackify(async (out) => {
      const chosen = file.files?.[0];
      if (!chosen) {
        out.append(errorBox("Choose a CSV file."));
        return;
      }
      const oversize = validateUpload(chosen.size);
      if (oversize) {
        out.append(errorBox(oversize.message));
        return;
      }
      const report = await state.api.importUsers(await chosen.text());
      out.append(noteBox(`Imported ${report.inserted} user(s).`));
      const generated = Object.entries(report.generated_passwords);
      if (generated.length) {
        out.append(noteBox("Generated passwords (shown once): " +
            generated.map(([code, pw]) => `${code}: ${pw}`).join(", ")));
      }
    }, box, form));
    return form;
  }

  function roleForm(): HTMLElement {
    const userId = el("input", { name: "user_id", type: "number",
                                 required: true });
    const title = el("select", { name: "title_id" },
        el("option", { value: "" }, "(keep title)"),
        ...catalog.titles.map((t) =>
            el("option", { value: String(t.title_id) },
               `${t.title_id}: ${t.title_name}`)));
    const affln = el("select", { name: "affln_id" },
        el("option", { value: "" }, "(keep affiliation)"),
        ...catalog.affiliations.map((a) =>
            el("option", { value: String(a.affln_id) },
               `${a.affln_id}: ${a.name}`)));
    const unlock = el("input", { type: "checkbox", name: "unlock" });
    const box = el("div", { class: "feedback" });
    const form = el("form", { class: "card" },
        el("h3", {}, "Update user role"),
        el("label", {}, "User id", userId),
        el("label", {}, "Title", title),
        el("label", {}, "Affiliation", affln),
        el("label", { class: "inline" }, unlock, " unlock account"),
        el("button", { type: "submit" }, "Apply"), box);
    form.addEventListener("submit", feedbackify(async (out) => {
      const changes: Record<string, unknown> = {};
      if (title.value) changes.title_id = Number(title.value);
      if (affln.value) changes.affln_id = Number(affln.value);
      if (unlock.checked) changes.unlock = true;
      const role = await state.api.updateUserRole(Number(userId.value), changes);
      out.append(noteBox(`Role updated; user is now level ${role.level}.`));
    }, box, form));
    return form;
  }

  function backupCard(): HTMLElement {
    const box = el("div", { class: "feedback" });
    const confirmRow = el("div", { class: "confirm-dialog", hidden: true },
        el("p", {}, "Back up the database now?"),
        el("button", { type: "button", "data-confirm": "yes",
                       onclick: () => void run() }, "Confirm"),
        el("button", {
          type: "button", "data-confirm": "no",
          onclick: () => { confirmRow.hidden = true; },
        }, "Cancel"));
    const card = el("div", { class: "card" },
        el("h3", {}, "Database backup"),
        el("button", {
          type: "button", "data-backup": "open",
          onclick: () => { confirmRow.hidden = false; },
        }, "Backup database"),
        confirmRow, box);

    async function run(): Promise<void> {
      clear(box);
      confirmRow.hidden = true;
      try {
        const handle = await state.api.triggerBackup(true);
        box.append(noteBox(`Archive ${handle.archive} written.`));
      } catch (failure) {
        if (failure instanceof ApiFailure) {
          box.append(errorBox(failure.error.message, failure.error.code));
        }
      }
    }
    return card;
  }
}
