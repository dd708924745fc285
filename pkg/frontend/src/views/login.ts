import { ApiFailure } from "../api.js";
import { clear, el, errorBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";

export function renderLogin(root: HTMLElement, state: AppState): void {
  clear(root);
  const feedback = el("div", { class: "feedback" });
  const user = el("input", { name: "user_code", autocomplete: "username",
                             required: true });
  const password = el("input", { type: "password", name: "password",
                                 autocomplete: "current-password",
                                 required: true });
  const form = el("form", {
    class: "card login",
    onsubmit: (event: Event) => {
      event.preventDefault();
      clear(feedback);
      void withFormLock(form, async () => {
        try {
          await state.login(user.value.trim(), password.value);
        } catch (failure) {
          if (failure instanceof ApiFailure) {
            const { code, message } = failure.error;
            feedback.append(errorBox(
                code === "account-locked"
                  ? "This account is locked after repeated failed logins." +
                    " Ask an administrator to unlock it."
                  : message, code));
          } else {
            feedback.append(errorBox("Could not reach the server."));
          }
        }
      });
    },
  },
      el("h2", {}, "Sign in"),
      el("label", {}, "Account", user),
      el("label", {}, "Password", password),
      el("button", { type: "submit" }, "Log in"),
      feedback);
  root.append(form);
  user.focus();
}
