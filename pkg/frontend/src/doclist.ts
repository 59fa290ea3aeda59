// Search hit list with KWIC snippets.

import type { SearchResult } from "./types.js";

export class DocList {
  readonly element: HTMLElement;
  private totalLabel: HTMLElement;
  private list: HTMLElement;

  constructor(doc: Document, private onOpen: (docId: string) => void) {
    this.element = doc.createElement("section");
    this.element.className = "doc-list";
    const heading = doc.createElement("h2");
    heading.textContent = "Documents";
    this.totalLabel = doc.createElement("span");
    this.totalLabel.className = "doc-total";
    heading.appendChild(this.totalLabel);
    this.element.appendChild(heading);
    this.list = doc.createElement("ul");
    this.element.appendChild(this.list);
  }

  render(result: SearchResult): void {
    const doc = this.element.ownerDocument;
    this.totalLabel.textContent = String(result.total);
    this.list.textContent = "";
    for (const hit of result.hits) {
      const item = doc.createElement("li");
      item.className = "doc-row";
      item.dataset.docId = hit.docId;
      const link = doc.createElement("a");
      link.href = "#";
      link.className = "doc-link";
      link.textContent = hit.docId;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        this.onOpen(hit.docId);
      });
      item.appendChild(link);
      const score = doc.createElement("span");
      score.className = "doc-score";
      score.textContent = hit.score ? ` score ${hit.score}` : "";
      item.appendChild(score);
      for (const window of hit.kwic) {
        const snippet = doc.createElement("p");
        snippet.className = "kwic";
        snippet.append(window.pre);
        const mark = doc.createElement("mark");
        mark.textContent = window.match;
        snippet.appendChild(mark);
        snippet.append(window.post);
        item.appendChild(snippet);
      }
      this.list.appendChild(item);
    }
  }

  rows(): HTMLElement[] {
    return Array.from(this.list.querySelectorAll(".doc-row")) as HTMLElement[];
  }
}
