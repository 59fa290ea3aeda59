// Application orchestrator: owns the ViewState, mirrors it into the URL
// fragment, refetches the dependent views on every change (superseded
// fetches are cancelled) and routes mutations through the reader.

import { ApiClient } from "./api.js";
import { DocList } from "./doclist.js";
import { FilterBar } from "./filterbar.js";
import { GraphView } from "./graphview.js";
import { NoticeArea } from "./notices.js";
import { Reader } from "./reader.js";
import {
  ViewState,
  defaultViewState,
  normalizeViewState,
  parseViewState,
  serializeViewState,
  statesEqual,
} from "./state.js";
import type { GraphNode, GraphSide, Selection } from "./types.js";

const SEARCH_LIMIT = 20;
const HIGHLIGHT_TOP_K = 10;

type Region = "search" | "entityGraph" | "keywordGraph" | "histogram";

export class App {
  state: ViewState = defaultViewState();
  readonly filterBar: FilterBar;
  readonly docList: DocList;
  readonly entityGraph: GraphView;
  readonly keywordGraph: GraphView;
  readonly reader: Reader;
  readonly notices: NoticeArea;

  private aborters = new Map<Region, AbortController>();
  private pending = new Set<Promise<unknown>>();
  private onFragmentChange: (fragment: string) => void;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    onFragmentChange?: (fragment: string) => void,
  ) {
    const doc = root.ownerDocument;
    this.onFragmentChange = onFragmentChange ?? (() => {});

    this.notices = new NoticeArea(doc);
    this.filterBar = new FilterBar(doc, {
      onQuery: (query) => this.updateSelection({ query }),
      onRemoveEntity: (id) =>
        this.updateSelection({
          entities: this.state.selection.entities.filter((e) => e !== id),
        }),
      onRemoveTag: (label) =>
        this.updateSelection({
          tags: this.state.selection.tags.filter((t) => t !== label),
        }),
      onRemoveDict: (name) =>
        this.updateSelection({
          dicts: this.state.selection.dicts.filter((d) => d !== name),
        }),
      onLanguage: (language) => this.updateSelection({ language }),
      onTimeRange: (timeRange) => this.updateSelection({ timeRange }),
    });
    this.docList = new DocList(doc, (docId) => this.openDocument(docId));
    this.entityGraph = new GraphView(doc, "Entity network", {
      onNodeClick: (node) => this.onNodeClick(node),
      onNodeHover: (node) => this.onNodeHover(node, "entities"),
    });
    this.keywordGraph = new GraphView(doc, "Keyword network", {
      onNodeClick: (node) => this.onNodeClick(node),
      onNodeHover: (node) => this.onNodeHover(node, "keywords"),
    });
    this.reader = new Reader(doc, api, {
      onClose: () => this.setState({ ...this.state, activeDoc: null }),
      onMutated: () => this.afterMutation(),
      notify: (message, kind) => this.notices.show(message, kind),
    });

    const graphs = doc.createElement("div");
    graphs.className = "graphs";
    graphs.appendChild(this.wrapWithParamSliders(doc, this.entityGraph, "entityGraph"));
    graphs.appendChild(this.wrapWithParamSliders(doc, this.keywordGraph, "keywordGraph"));

    const main = doc.createElement("main");
    main.appendChild(graphs);
    main.appendChild(this.docList.element);
    main.appendChild(this.reader.element);

    root.append(this.notices.element, this.filterBar.element, main);
  }

  private wrapWithParamSliders(
    doc: Document,
    view: GraphView,
    which: "entityGraph" | "keywordGraph",
  ): HTMLElement {
    const box = doc.createElement("div");
    box.className = `graph-box graph-box-${which}`;
    const controls = doc.createElement("div");
    controls.className = "graph-controls";
    const mkSlider = (
      label: string,
      cls: string,
      min: number,
      max: number,
      value: number,
      apply: (v: number) => void,
    ) => {
      const wrap = doc.createElement("label");
      wrap.textContent = label;
      const input = doc.createElement("input");
      input.type = "range";
      input.className = cls;
      input.min = String(min);
      input.max = String(max);
      input.value = String(value);
      input.addEventListener("change", () => apply(Number(input.value)));
      wrap.appendChild(input);
      controls.appendChild(wrap);
    };
    mkSlider("nodes/type", "param-nodes", 1, 50, this.state[which].nodesPerType, (v) =>
      this.setState({
        ...this.state,
        [which]: { ...this.state[which], nodesPerType: v },
      } as ViewState),
    );
    mkSlider("min edge", "param-edges", 1, 20, this.state[which].minEdgeWeight, (v) =>
      this.setState({
        ...this.state,
        [which]: { ...this.state[which], minEdgeWeight: v },
      } as ViewState),
    );
    box.appendChild(controls);
    box.appendChild(view.element);
    return box;
  }

  // -- state handling --------------------------------------------------

  private updateSelection(patch: Partial<Selection>): void {
    this.setState({
      ...this.state,
      selection: { ...this.state.selection, ...patch },
    });
  }

  setState(next: ViewState): void {
    const normalized = normalizeViewState(next);
    if (statesEqual(normalized, this.state)) return;
    const openedDoc =
      normalized.activeDoc !== this.state.activeDoc ? normalized.activeDoc : undefined;
    const selectionChanged =
      serializeViewState({ ...normalized, activeDoc: null }) !==
      serializeViewState({ ...this.state, activeDoc: null });
    this.state = normalized;
    this.onFragmentChange(serializeViewState(this.state));
    if (selectionChanged) {
      this.refresh();
    }
    if (openedDoc !== undefined) {
      if (openedDoc === null) {
        this.reader.element.hidden = true;
      } else {
        this.loadDocument(openedDoc);
      }
    }
  }

  applyFragment(fragment: string): void {
    const parsed = parseViewState(fragment);
    if (!statesEqual(parsed, this.state)) {
      this.setState(parsed);
    }
  }

  private track<T>(promise: Promise<T>): Promise<T | null> {
    const settled = promise.catch((error: any) => {
      if (error?.name === "AbortError") return null;
      this.notices.show(String(error?.message ?? error));
      return null;
    });
    this.pending.add(settled);
    settled.finally(() => this.pending.delete(settled));
    return settled;
  }

  async idle(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.allSettled([...this.pending]);
    }
  }

  private regionSignal(region: Region): AbortSignal {
    this.aborters.get(region)?.abort();
    const controller = new AbortController();
    this.aborters.set(region, controller);
    return controller.signal;
  }

  // -- data flow ---------------------------------------------------------

  async start(): Promise<void> {
    await this.track(
      this.api.collection().then((info) => {
        this.filterBar.renderLanguages(info.languages, this.state.selection.language);
      }),
    );
    this.refresh();
    if (this.state.activeDoc) this.loadDocument(this.state.activeDoc);
    await this.idle();
  }

  refresh(): void {
    const selection = this.state.selection;
    this.filterBar.renderSelection(selection);
    this.track(
      this.api
        .search(selection, SEARCH_LIMIT, 0, this.regionSignal("search"))
        .then((result) => result && this.docList.render(result)),
    );
    this.track(
      this.api
        .entityNetwork(selection, this.state.entityGraph, this.regionSignal("entityGraph"))
        .then((graph) => {
          if (!graph) return;
          for (const node of graph.nodes) {
            if (node.id.startsWith("e:")) {
              this.filterBar.rememberEntityName(Number(node.id.slice(2)), node.label);
            }
          }
          this.entityGraph.render(graph);
          this.filterBar.renderSelection(this.state.selection);
        }),
    );
    this.track(
      this.api
        .keywordNetwork(selection, this.state.keywordGraph, this.regionSignal("keywordGraph"))
        .then((graph) => graph && this.keywordGraph.render(graph)),
    );
    this.track(
      this.api
        .timeHistogram(selection, "year", this.regionSignal("histogram"))
        .then(
          (histogram) =>
            histogram && this.filterBar.renderTimeBuckets(histogram, selection.timeRange),
        ),
    );
  }

  private onNodeClick(node: GraphNode): void {
    if (node.id.startsWith("e:")) {
      const id = Number(node.id.slice(2));
      this.filterBar.rememberEntityName(id, node.label);
      if (!this.state.selection.entities.includes(id)) {
        this.updateSelection({ entities: [...this.state.selection.entities, id] });
      }
    } else if (node.id.startsWith("k:")) {
      const term = node.id.slice(2);
      const unit = term.includes(" ") ? `"${term}"` : term;
      const query = this.state.selection.query;
      if (!query || !query.includes(unit)) {
        this.updateSelection({ query: query ? `${query} ${unit}` : unit });
      }
    } else if (node.id.startsWith("t:")) {
      const label = node.id.slice(2);
      if (!this.state.selection.tags.includes(label)) {
        this.updateSelection({ tags: [...this.state.selection.tags, label] });
      }
    }
  }

  private onNodeHover(node: GraphNode | null, side: GraphSide): void {
    const other = side === "entities" ? this.keywordGraph : this.entityGraph;
    if (node === null) {
      other.clearEmphasis();
      return;
    }
    this.track(
      this.api.highlight(node.id, side, this.state.selection, HIGHLIGHT_TOP_K).then((result) => {
        if (result) other.emphasize(new Set(result.items.map((item) => item.nodeId)));
      }),
    );
  }

  openDocument(docId: string): void {
    this.setState({ ...this.state, activeDoc: docId });
  }

  private loadDocument(docId: string): void {
    this.track(this.api.document(docId).then((record) => record && this.reader.render(record)));
  }

  private afterMutation(): void {
    if (this.state.activeDoc) this.loadDocument(this.state.activeDoc);
    this.refresh();
  }
}
