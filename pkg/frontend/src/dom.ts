/** Small DOM construction helper so views stay framework-free. */

type Child = Node | string | null | undefined;
type Attrs = Record<string, string | number | boolean | EventListener>;

export function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, attrs: Attrs = {}, ...children: Child[]): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value as EventListener);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, String(value));
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Disable a form's buttons while an async submission is in flight. */
export async function withFormLock<T>(form: HTMLFormElement,
                                      work: () => Promise<T>): Promise<T> {
  const buttons = Array.from(
      form.querySelectorAll<HTMLButtonElement>("button, input[type=submit]"));
  buttons.forEach((b) => { b.disabled = true; });
  try {
    return await work();
  } finally {
    buttons.forEach((b) => { b.disabled = false; });
  }
}

export function errorBox(message: string, field?: string): HTMLElement {
  const box = el("p", { class: "error", role: "alert" }, message);
  if (field) box.dataset.field = field;
  return box;
}

export function noteBox(message: string): HTMLElement {
  return el("p", { class: "note" }, message);
}
