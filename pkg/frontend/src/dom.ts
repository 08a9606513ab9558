// Small DOM construction helpers; keeps the view modules terse.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text) node.textContent = text;
  return node;
}

export function button(
  label: string,
  cls: string,
  onClick: () => void,
  enabled = true,
): HTMLButtonElement {
  const b = el("button", cls, label);
  b.disabled = !enabled;
  b.addEventListener("click", onClick);
  return b;
}

export function chip(text: string, kind: string): HTMLSpanElement {
  return el("span", `chip chip-${kind}`, text);
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}
