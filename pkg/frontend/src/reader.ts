// Document reader: annotated full text, tag box, annotation editor and the
// entity merge panel. Text selection inside the text pane opens the editor
// prefilled with the selected span.

import { ApiClient } from "./api.js";
import { colorForType } from "./layout.js";
import type { AnnotationEdit, DocumentRecord, EntitySummary } from "./types.js";

export interface ReaderCallbacks {
  onClose: () => void;
  onMutated: () => void; // reload document and dependent views
  notify: (message: string, kind?: "error" | "info") => void;
}

export class Reader {
  readonly element: HTMLElement;
  private record: DocumentRecord | null = null;
  private textPane: HTMLElement;
  private metaPane: HTMLElement;
  private tagPane: HTMLElement;
  private editorPane: HTMLElement;
  private mergePane: HTMLElement;
  private pendingEdits = 0;

  constructor(doc: Document, private api: ApiClient, private callbacks: ReaderCallbacks) {
    this.element = doc.createElement("section");
    this.element.className = "reader";
    this.element.hidden = true;

    const head = doc.createElement("div");
    head.className = "reader-head";
    const title = doc.createElement("h2");
    title.className = "reader-title";
    head.appendChild(title);
    const close = doc.createElement("button");
    close.className = "reader-close";
    close.textContent = "close";
    close.addEventListener("click", () => this.callbacks.onClose());
    head.appendChild(close);
    this.element.appendChild(head);

    this.metaPane = doc.createElement("dl");
    this.metaPane.className = "reader-meta";
    this.element.appendChild(this.metaPane);

    this.tagPane = doc.createElement("div");
    this.tagPane.className = "reader-tags";
    this.element.appendChild(this.tagPane);

    this.textPane = doc.createElement("div");
    this.textPane.className = "reader-text";
    this.textPane.addEventListener("mouseup", () => this.captureSelection());
    this.element.appendChild(this.textPane);

    this.editorPane = doc.createElement("div");
    this.editorPane.className = "annotation-editor";
    this.element.appendChild(this.editorPane);

    this.mergePane = doc.createElement("div");
    this.mergePane.className = "merge-panel";
    this.element.appendChild(this.mergePane);
  }

  get pending(): number {
    return this.pendingEdits;
  }

  render(record: DocumentRecord): void {
    this.record = record;
    this.element.hidden = false;
    const doc = this.element.ownerDocument;
    (this.element.querySelector(".reader-title") as HTMLElement).textContent =
      record.metadata["subject"] ?? record.sourcePath;

    this.metaPane.textContent = "";
    const metaRows: [string, string][] = [
      ["language", record.language],
      ["source", record.sourcePath],
    ];
    if (record.timeRange) metaRows.push(["time", `${record.timeRange[0]} – ${record.timeRange[1]}`]);
    for (const [key, value] of metaRows) {
      const dt = doc.createElement("dt");
      dt.textContent = key;
      const dd = doc.createElement("dd");
      dd.textContent = value;
      this.metaPane.append(dt, dd);
    }

    this.renderTags(record);
    this.renderText(record);
    this.renderEditor(null);
    this.renderMergePanel(record);
  }

  private renderTags(record: DocumentRecord): void {
    const doc = this.element.ownerDocument;
    this.tagPane.textContent = "";
    for (const tag of record.tags) {
      const chip = doc.createElement("span");
      chip.className = "chip chip-tag";
      chip.textContent = tag.label;
      const x = doc.createElement("button");
      x.textContent = "×";
      x.addEventListener("click", () => this.removeTag(tag.label));
      chip.appendChild(x);
      this.tagPane.appendChild(chip);
    }
    const form = doc.createElement("form");
    form.className = "tag-form";
    const input = doc.createElement("input");
    input.name = "tag";
    input.placeholder = "add tag";
    form.appendChild(input);
    const button = doc.createElement("button");
    button.type = "submit";
    button.textContent = "Tag";
    form.appendChild(button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const label = input.value.trim();
      if (label) this.addTag(label);
    });
    this.tagPane.appendChild(form);
  }

  private renderText(record: DocumentRecord): void {
    const doc = this.element.ownerDocument;
    this.textPane.textContent = "";
    const annotations = [...record.annotations].sort((a, b) => a.start - b.start || b.end - a.end);
    let cursor = 0;
    for (const ann of annotations) {
      if (ann.start < cursor) continue; // overlapping: first one wins visually
      if (ann.start > cursor) {
        this.textPane.append(record.text.slice(cursor, ann.start));
      }
      const mark = doc.createElement("mark");
      mark.className = `ann ann-${ann.type} ann-origin-${ann.origin}`;
      mark.dataset.type = ann.type;
      mark.dataset.start = String(ann.start);
      mark.dataset.end = String(ann.end);
      mark.style.backgroundColor = colorForType(ann.type) + "33";
      mark.title = `${ann.type}${ann.normalized ? ` = ${ann.normalized}` : ""} (${ann.origin})`;
      mark.textContent = record.text.slice(ann.start, ann.end);
      mark.addEventListener("click", () => this.renderEditor([ann.start, ann.end], ann.type));
      this.textPane.appendChild(mark);
      cursor = ann.end;
    }
    this.textPane.append(record.text.slice(cursor));
  }

  private captureSelection(): void {
    const doc = this.element.ownerDocument;
    const selection = doc.defaultView?.getSelection();
    if (!selection || selection.isCollapsed || !this.record) return;
    const selected = selection.toString();
    if (!selected.trim()) return;
    const start = this.record.text.indexOf(selected);
    if (start < 0) return;
    this.renderEditor([start, start + selected.length], null);
  }

  private renderEditor(span: [number, number] | null, currentType: string | null = null): void {
    const doc = this.element.ownerDocument;
    this.editorPane.textContent = "";
    if (!this.record || !span) return;
    const [start, end] = span;
    const heading = doc.createElement("h3");
    heading.textContent = `annotate [${start}, ${end}) “${this.record.text.slice(start, end)}”`;
    this.editorPane.appendChild(heading);

    const typeInput = doc.createElement("input");
    typeInput.className = "editor-type";
    typeInput.placeholder = "type (person, organization, location, ...)";
    typeInput.value = currentType && currentType ? "" : "";
    this.editorPane.appendChild(typeInput);

    const mkButton = (label: string, cls: string, action: () => void) => {
      const button = doc.createElement("button");
      button.textContent = label;
      button.className = cls;
      button.addEventListener("click", action);
      this.editorPane.appendChild(button);
    };
    mkButton("Create", "editor-create", () => {
      const newType = typeInput.value.trim();
      if (!newType) return this.callbacks.notify("enter a type name", "info");
      this.applyEdit({ kind: "Create", docId: this.record!.id, span, newType });
    });
    if (currentType) {
      mkButton("Retype", "editor-retype", () => {
        const newType = typeInput.value.trim();
        if (!newType) return this.callbacks.notify("enter the new type", "info");
        this.applyEdit({
          kind: "Retype", docId: this.record!.id, span, oldType: currentType, newType,
        });
      });
      mkButton("Delete", "editor-delete", () => {
        this.applyEdit({ kind: "Delete", docId: this.record!.id, span, oldType: currentType });
      });
    }
    mkButton("New type", "editor-new-type", () => {
      const name = typeInput.value.trim();
      if (!name) return this.callbacks.notify("enter a type name", "info");
      this.api
        .createType(name)
        .then(() => this.callbacks.notify(`type '${name}' created`, "info"))
        .catch((error) => this.callbacks.notify(String(error.message ?? error)));
    });
  }

  private renderMergePanel(record: DocumentRecord): void {
    const doc = this.element.ownerDocument;
    this.mergePane.textContent = "";
    const heading = doc.createElement("h3");
    heading.textContent = "Entities in this document";
    this.mergePane.appendChild(heading);
    const seen = new Set<string>();
    for (const ann of record.annotations) {
      if (!["person", "organization", "location"].includes(ann.type)) continue;
      const key = `${ann.surface.toLowerCase()}|${ann.type}`;
      if (seen.has(key)) continue;
      seen.add(key);
      const row = doc.createElement("div");
      row.className = "merge-row";
      const label = doc.createElement("span");
      label.textContent = `${ann.surface} [${ann.type}]`;
      row.appendChild(label);
      const search = doc.createElement("input");
      search.className = "merge-search";
      search.placeholder = "merge into…";
      row.appendChild(search);
      const find = doc.createElement("button");
      find.className = "merge-find";
      find.textContent = "Find";
      row.appendChild(find);
      const results = doc.createElement("ul");
      results.className = "merge-results";
      row.appendChild(results);
      find.addEventListener("click", async () => {
        try {
          const sourceLookup = await this.api.entityLookup(ann.surface, ann.type, 5);
          const source = sourceLookup.entities.find(
            (e) => e.name.toLowerCase() === ann.surface.toLowerCase(),
          ) ?? sourceLookup.entities[0];
          const found = await this.api.entityLookup(search.value.trim(), ann.type, 8);
          results.textContent = "";
          for (const candidate of found.entities) {
            if (!source || candidate.id === source.id) continue;
            const item = doc.createElement("li");
            const pick = doc.createElement("button");
            pick.className = "merge-pick";
            pick.dataset.targetId = String(candidate.id);
            pick.textContent = `${candidate.name} (${candidate.docCount} docs)`;
            pick.addEventListener("click", () => this.merge(source!.id, candidate.id));
            item.appendChild(pick);
            results.appendChild(item);
          }
          if (!results.children.length) {
            this.callbacks.notify("no merge candidates found", "info");
          }
        } catch (error: any) {
          this.callbacks.notify(String(error.message ?? error));
        }
      });
      this.mergePane.appendChild(row);
    }
  }

  private track<T>(promise: Promise<T>): Promise<T> {
    this.pendingEdits += 1;
    return promise.finally(() => {
      this.pendingEdits -= 1;
    });
  }

  private addTag(label: string): void {
    if (!this.record) return;
    // optimistic: show the chip immediately, roll back on failure
    const docId = this.record.id;
    const rollback = [...this.record.tags];
    this.record.tags = [
      ...this.record.tags,
      { docId, label, author: "user", createdAt: "" },
    ];
    this.renderTags(this.record);
    this.track(this.api.addTag(docId, label))
      .then(() => this.callbacks.onMutated())
      .catch((error) => {
        if (this.record) {
          this.record.tags = rollback;
          this.renderTags(this.record);
        }
        this.notifyMutationError(error);
      });
  }

  private removeTag(label: string): void {
    if (!this.record) return;
    const docId = this.record.id;
    const rollback = [...this.record.tags];
    this.record.tags = this.record.tags.filter((t) => t.label !== label);
    this.renderTags(this.record);
    this.track(this.api.removeTag(docId, label))
      .then(() => this.callbacks.onMutated())
      .catch((error) => {
        if (this.record) {
          this.record.tags = rollback;
          this.renderTags(this.record);
        }
        this.notifyMutationError(error);
      });
  }

  private applyEdit(edit: AnnotationEdit): void {
    this.track(this.api.annotate(edit))
      .then(() => this.callbacks.onMutated())
      .catch((error) => this.notifyMutationError(error));
  }

  private merge(sourceId: number, targetId: number): void {
    this.track(this.api.mergeEntities(sourceId, targetId))
      .then((result) =>
        this.callbacks.notify(
          `merged into ${targetId}: ${result.docCount} documents`, "info",
        ),
      )
      .then(() => this.callbacks.onMutated())
      .catch((error) => this.notifyMutationError(error));
  }

  private notifyMutationError(error: any): void {
    if (error?.status === 409) {
      this.callbacks.notify("conflicting change on the server; view refreshed, please retry");
      this.callbacks.onMutated();
    } else {
      this.callbacks.notify(String(error?.message ?? error));
    }
  }
}
