/** Transient error toasts, stacked bottom-right. */

import { el } from "./dom";

export class ToastHost {
  readonly element: HTMLElement;
  private readonly ttlMs: number;

  constructor(ttlMs = 5000) {
    this.ttlMs = ttlMs;
    this.element = el("div", { class: "toast-host" });
  }

  show(message: string): void {
    const toast = el("div", { class: "toast", text: message });
    toast.addEventListener("click", () => toast.remove());
    this.element.appendChild(toast);
    setTimeout(() => toast.remove(), this.ttlMs);
  }
}
