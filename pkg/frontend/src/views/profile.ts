/** Personal information editing and password change. */

import { ApiFailure } from "../api.js";
import { clear, el, errorBox, noteBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";
import { validatePasswordChange } from "../validate.js";

export function renderProfile(root: HTMLElement, state: AppState): void {
  clear(root);
  root.append(el("h2", {}, "My profile"));
  const info = el("div", {});
  root.append(info, passwordForm());
  void load();

  async function load(): Promise<void> {
    clear(info);
    try {
      const profile = await state.api.profile();
      info.append(
          el("p", {}, `${profile.first_name} ${profile.last_name}` +
                      ` (${profile.user_code})`),
          editForm(profile));
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        info.append(errorBox(failure.error.message));
      }
    }
  }

  function editForm(profile: Record<string, unknown>): HTMLElement {
    const email = el("input", { name: "email", type: "email",
                                value: String(profile.email ?? "") });
    const homePhone = el("input", { name: "home_phone",
                                    value: String(profile.home_phone ?? "") });
    const cellPhone = el("input", { name: "cell_phone",
                                    value: String(profile.cell_phone ?? "") });
    const address = el("input", { name: "street_address",
                                  value: String(profile.street_address ?? "") });
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        void withFormLock(form, async () => {
          try {
            await state.api.updateProfile({
              email: email.value, home_phone: homePhone.value,
              cell_phone: cellPhone.value, street_address: address.value,
            });
            box.append(noteBox("Profile saved."));
          } catch (failure) {
            if (failure instanceof ApiFailure) {
              box.append(errorBox(failure.error.message, failure.error.field));
            }
          }
        });
      },
    },
        el("h3", {}, "Personal information"),
        el("label", {}, "Email", email),
        el("label", {}, "Home phone", homePhone),
        el("label", {}, "Cell phone", cellPhone),
        el("label", {}, "Street address", address),
        el("button", { type: "submit" }, "Save"), box);
    return form;
  }

  function passwordForm(): HTMLElement {
    const current = el("input", { type: "password", name: "current",
                                  autocomplete: "current-password" });
    const next = el("input", { type: "password", name: "new",
                               autocomplete: "new-password" });
    const confirm = el("input", { type: "password", name: "confirm",
                                  autocomplete: "new-password" });
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        const problem = validatePasswordChange(current.value, next.value,
                                               confirm.value);
        if (problem) {                      // mismatch never reaches the wire
          box.append(errorBox(problem.message, problem.field));
          return;
        }
        void withFormLock(form, async () => {
          try {
            await state.api.changePassword(current.value, next.value,
                                           confirm.value);
            box.append(noteBox("Password changed."));
            current.value = next.value = confirm.value = "";
          } catch (failure) {
            if (failure instanceof ApiFailure) {
              box.append(errorBox(failure.error.message,
                                  failure.error.field ?? failure.error.code));
            }
          }
        });
      },
    },
        el("h3", {}, "Change password"),
        el("label", {}, "Current password", current),
        el("label", {}, "New password", next),
        el("label", {}, "Confirm new password", confirm),
        el("button", { type: "submit" }, "Change"), box);
    return form;
  }
}
