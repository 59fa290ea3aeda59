// Non-blocking notices: API errors and conflict prompts appear here and
// never interrupt the view.

export class NoticeArea {
  readonly element: HTMLElement;

  constructor(doc: Document) {
    this.element = doc.createElement("div");
    this.element.className = "notices";
  }

  show(message: string, kind: "error" | "info" = "error"): void {
    const doc = this.element.ownerDocument;
    const notice = doc.createElement("div");
    notice.className = `notice notice-${kind}`;
    notice.textContent = message;
    const dismiss = doc.createElement("button");
    dismiss.textContent = "×";
    dismiss.addEventListener("click", () => notice.remove());
    notice.appendChild(dismiss);
    this.element.appendChild(notice);
  }

  clear(): void {
    this.element.textContent = "";
  }
}
