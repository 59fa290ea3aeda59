// Filter bar: full-text query, active filter chips, language picker and
// the time-range slider pair fed by the time aggregation.

import type { Selection, TimeHistogram } from "./types.js";

export interface FilterBarCallbacks {
  onQuery: (query: string | null) => void;
  onRemoveEntity: (id: number) => void;
  onRemoveTag: (label: string) => void;
  onRemoveDict: (name: string) => void;
  onLanguage: (language: string | null) => void;
  onTimeRange: (range: [string, string] | null) => void;
}

export class FilterBar {
  readonly element: HTMLElement;
  private queryInput: HTMLInputElement;
  private chipRow: HTMLElement;
  private languageSelect: HTMLSelectElement;
  private fromSlider: HTMLInputElement;
  private toSlider: HTMLInputElement;
  private sliderLabel: HTMLElement;
  private buckets: string[] = [];
  private entityNames = new Map<number, string>();

  constructor(doc: Document, private callbacks: FilterBarCallbacks) {
    this.element = doc.createElement("header");
    this.element.className = "filter-bar";

    const form = doc.createElement("form");
    form.className = "query-form";
    this.queryInput = doc.createElement("input");
    this.queryInput.type = "search";
    this.queryInput.name = "query";
    this.queryInput.placeholder = "search terms, \"quoted phrases\"";
    form.appendChild(this.queryInput);
    const submit = doc.createElement("button");
    submit.type = "submit";
    submit.textContent = "Search";
    form.appendChild(submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const value = this.queryInput.value.trim();
      this.callbacks.onQuery(value === "" ? null : value);
    });
    this.element.appendChild(form);

    this.languageSelect = doc.createElement("select");
    this.languageSelect.className = "language-select";
    this.languageSelect.addEventListener("change", () => {
      this.callbacks.onLanguage(this.languageSelect.value || null);
    });
    this.element.appendChild(this.languageSelect);

    const sliderBox = doc.createElement("div");
    sliderBox.className = "time-slider";
    this.fromSlider = doc.createElement("input");
    this.fromSlider.type = "range";
    this.fromSlider.className = "time-from";
    this.toSlider = doc.createElement("input");
    this.toSlider.type = "range";
    this.toSlider.className = "time-to";
    this.sliderLabel = doc.createElement("span");
    this.sliderLabel.className = "time-label";
    sliderBox.append(this.fromSlider, this.toSlider, this.sliderLabel);
    const apply = doc.createElement("button");
    apply.type = "button";
    apply.className = "time-apply";
    apply.textContent = "Apply time";
    apply.addEventListener("click", () => this.applyTime());
    const clear = doc.createElement("button");
    clear.type = "button";
    clear.className = "time-clear";
    clear.textContent = "All time";
    clear.addEventListener("click", () => this.callbacks.onTimeRange(null));
    sliderBox.append(apply, clear);
    this.element.appendChild(sliderBox);

    this.chipRow = doc.createElement("div");
    this.chipRow.className = "chips";
    this.element.appendChild(this.chipRow);
  }

  private applyTime(): void {
    if (this.buckets.length === 0) return;
    const from = Math.min(Number(this.fromSlider.value), Number(this.toSlider.value));
    const to = Math.max(Number(this.fromSlider.value), Number(this.toSlider.value));
    const fromBucket = this.buckets[from]!;
    const toBucket = this.buckets[to]!;
    this.callbacks.onTimeRange([`${fromBucket}-01-01`, `${toBucket}-12-31`]);
  }

  rememberEntityName(id: number, name: string): void {
    this.entityNames.set(id, name);
  }

  renderSelection(selection: Selection): void {
    this.queryInput.value = selection.query ?? "";
    this.chipRow.textContent = "";
    const doc = this.element.ownerDocument;
    const addChip = (label: string, cls: string, onRemove: () => void) => {
      const chip = doc.createElement("span");
      chip.className = `chip ${cls}`;
      chip.textContent = label;
      const x = doc.createElement("button");
      x.textContent = "×";
      x.addEventListener("click", onRemove);
      chip.appendChild(x);
      this.chipRow.appendChild(chip);
    };
    for (const id of selection.entities) {
      addChip(this.entityNames.get(id) ?? `entity ${id}`, "chip-entity", () =>
        this.callbacks.onRemoveEntity(id),
      );
    }
    for (const label of selection.tags) {
      addChip(`tag: ${label}`, "chip-tag", () => this.callbacks.onRemoveTag(label));
    }
    for (const name of selection.dicts) {
      addChip(`dict: ${name}`, "chip-dict", () => this.callbacks.onRemoveDict(name));
    }
  }

  renderLanguages(languages: Record<string, number>, active: string | null): void {
    const doc = this.element.ownerDocument;
    this.languageSelect.textContent = "";
    const any = doc.createElement("option");
    any.value = "";
    any.textContent = "all languages";
    this.languageSelect.appendChild(any);
    for (const [lang, count] of Object.entries(languages).sort()) {
      const option = doc.createElement("option");
      option.value = lang;
      option.textContent = `${lang} (${count})`;
      this.languageSelect.appendChild(option);
    }
    this.languageSelect.value = active ?? "";
  }

  renderTimeBuckets(histogram: TimeHistogram, active: [string, string] | null): void {
    this.buckets = histogram.buckets.map((b) => b.bucket.slice(0, 4));
    const max = Math.max(0, this.buckets.length - 1);
    for (const slider of [this.fromSlider, this.toSlider]) {
      slider.min = "0";
      slider.max = String(max);
      slider.disabled = this.buckets.length === 0;
    }
    if (this.buckets.length) {
      if (active) {
        const fromIdx = this.buckets.indexOf(active[0].slice(0, 4));
        const toIdx = this.buckets.indexOf(active[1].slice(0, 4));
        this.fromSlider.value = String(fromIdx >= 0 ? fromIdx : 0);
        this.toSlider.value = String(toIdx >= 0 ? toIdx : max);
      } else {
        this.fromSlider.value = "0";
        this.toSlider.value = String(max);
      }
      this.sliderLabel.textContent = `${this.buckets[0]}–${this.buckets[max]}`;
    } else {
      this.sliderLabel.textContent = "no dated documents";
    }
  }
}
