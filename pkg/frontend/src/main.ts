// Browser bootstrap: wires the app to window.fetch, the URL fragment and
// hash navigation. The API is same-origin (the service mounts this bundle
// under /ui).

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const api = new ApiClient((input, init) => fetch(input, init), "");
let applyingFragment = false;
const app = new App(root, api, (fragment) => {
  applyingFragment = true;
  try {
    if (window.location.hash !== fragment) window.location.hash = fragment;
  } finally {
    applyingFragment = false;
  }
});

window.addEventListener("hashchange", () => {
  if (!applyingFragment) app.applyFragment(window.location.hash);
});

app.applyFragment(window.location.hash);
void app.start();
