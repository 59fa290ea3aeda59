// The exploration loop driven headlessly through the DOM: filter ->
// node click -> reader -> tag -> merge. Each step must issue exactly the
// documented API calls, nothing more.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import {
  DOCUMENT_D1,
  RecordedCall,
  flush,
  mockTransport,
  standardRoutes,
} from "./mockapi.js";

let app: App;
let calls: RecordedCall[];
let fragments: string[];

const REFRESH_SET = [
  "POST /api/search",
  "POST /api/networks/entities",
  "POST /api/networks/keywords",
  "GET /api/aggregations/time",
];

function callKeys(): string[] {
  return calls.map((c) => `${c.method} ${c.path}`);
}

beforeEach(async () => {
  document.body.innerHTML = '<div id="app"></div>';
  calls = [];
  fragments = [];
  const routes = standardRoutes();
  routes["POST /api/tags"] = (call) => ({
    status: 201,
    body: { docId: call.body.docId, label: call.body.label, author: "user", createdAt: "now" },
  });
  routes["GET /api/entities"] = (call) => {
    const q = (call.params?.q ?? "").toLowerCase();
    if (q.includes("kmt")) {
      return { body: { entities: [{ id: 9, name: "KMT", type: "organization", docCount: 1 }] } };
    }
    return {
      body: { entities: [{ id: 2, name: "Kuomintang", type: "organization", docCount: 2 }] },
    };
  };
  routes["POST /api/entities/merge"] = (call) => ({
    body: { sourceId: call.body.sourceId, targetId: call.body.targetId, docCount: 3 },
  });
  const api = new ApiClient(mockTransport(routes, calls));
  app = new App(document.getElementById("app")!, api, (f) => fragments.push(f));
  await app.start();
  await flush();
  calls.length = 0;
});

describe("interaction loop issues exactly the documented calls", () => {
  it("filter: query submit refetches list, both graphs and the histogram", async () => {
    const input = document.querySelector(".query-form input") as HTMLInputElement;
    input.value = "china";
    document
      .querySelector(".query-form")!
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await app.idle();
    await flush();
    expect(callKeys()).toEqual(REFRESH_SET);
    expect(calls[0]!.body.selection.query).toBe("china");
    expect(JSON.parse(calls[3]!.params!.selection!).query).toBe("china");
    expect(fragments.at(-1)).toContain(encodeURIComponent('"query":"china"'));
  });

  it("node click: adds the entity to the selection and refetches", async () => {
    const node = Array.from(document.querySelectorAll(".graph-node")).find(
      (n) => (n as HTMLElement).dataset.nodeId === "e:1",
    )!;
    node.dispatchEvent(new MouseEvent("click"));
    await app.idle();
    await flush();
    expect(callKeys()).toEqual(REFRESH_SET);
    for (const call of calls.slice(0, 3)) {
      expect(call.body.selection.entities).toEqual([1]);
    }
    expect(app.state.selection.entities).toEqual([1]);
  });

  it("reader: opening a document issues exactly the document fetch", async () => {
    (document.querySelector(".doc-row .doc-link") as HTMLElement).click();
    await app.idle();
    await flush();
    expect(callKeys()).toEqual(["GET /api/documents/d1"]);
    expect(document.querySelector(".reader")!.hasAttribute("hidden")).toBe(false);
    expect(app.state.activeDoc).toBe("d1");
  });

  it("tag: submitting the tag form posts the tag then refreshes", async () => {
    (document.querySelector(".doc-row .doc-link") as HTMLElement).click();
    await app.idle();
    await flush();
    calls.length = 0;

    const tagInput = document.querySelector(".tag-form input") as HTMLInputElement;
    tagInput.value = "lead";
    document.querySelector(".tag-form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    // optimistic chip before the server answers
    expect(
      Array.from(document.querySelectorAll(".reader-tags .chip")).map((c) =>
        c.textContent!.replace("×", ""),
      ),
    ).toContain("lead");
    await app.idle();
    await flush();
    expect(callKeys()).toEqual(["POST /api/tags", "GET /api/documents/d1", ...REFRESH_SET]);
    expect(calls[0]!.body).toEqual({ docId: "d1", label: "lead" });
  });

  it("merge: search-and-pick looks entities up, merges, then refreshes", async () => {
    (document.querySelector(".doc-row .doc-link") as HTMLElement).click();
    await app.idle();
    await flush();
    calls.length = 0;

    const rows = Array.from(document.querySelectorAll(".merge-row"));
    const kuoRow = rows.find((r) => r.textContent!.includes("Kuomintang"))! as HTMLElement;
    (kuoRow.querySelector(".merge-search") as HTMLInputElement).value = "KMT";
    (kuoRow.querySelector(".merge-find") as HTMLElement).click();
    await app.idle();
    await flush();
    expect(callKeys()).toEqual(["GET /api/entities", "GET /api/entities"]);
    expect(calls[0]!.params!.q).toBe("Kuomintang");
    expect(calls[1]!.params!.q).toBe("KMT");
    calls.length = 0;

    const pick = kuoRow.querySelector(".merge-pick") as HTMLElement;
    expect(pick.textContent).toContain("KMT");
    pick.click();
    await app.idle();
    await flush();
    expect(callKeys()).toEqual([
      "POST /api/entities/merge",
      "GET /api/documents/d1",
      ...REFRESH_SET,
    ]);
    expect(calls[0]!.body).toEqual({ sourceId: 2, targetId: 9 });
  });

  it("conflicting mutation rolls back optimistic state and prompts retry", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const conflictCalls: RecordedCall[] = [];
    const routes = standardRoutes();
    routes["POST /api/tags"] = () => ({
      status: 409,
      body: { code: "conflict", message: "tag raced another change" },
    });
    const conflictApp = new App(
      document.getElementById("app")!,
      new ApiClient(mockTransport(routes, conflictCalls)),
    );
    await conflictApp.start();
    await flush();
    (document.querySelector(".doc-row .doc-link") as HTMLElement).click();
    await conflictApp.idle();
    await flush();

    const tagInput = document.querySelector(".tag-form input") as HTMLInputElement;
    tagInput.value = "doomed";
    document.querySelector(".tag-form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    // optimistic chip visible while in flight
    const chipText = () =>
      Array.from(document.querySelectorAll(".reader-tags .chip")).map((c) =>
        c.textContent!.replace("×", ""),
      );
    expect(chipText()).toContain("doomed");
    await conflictApp.idle();
    await flush();
    // rolled back, conflict notice shown, view refetched for retry
    expect(chipText()).not.toContain("doomed");
    const notices = Array.from(document.querySelectorAll(".notices .notice")).map(
      (n) => n.textContent,
    );
    expect(notices.some((n) => n!.includes("retry"))).toBe(true);
    expect(conflictCalls.map((c) => `${c.method} ${c.path}`)).toContain("GET /api/documents/d1");
  });
});
