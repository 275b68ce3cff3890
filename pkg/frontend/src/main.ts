import { makeClient } from "./api.js";
import { mountConsole } from "./app.js";

const api = new URLSearchParams(window.location.search).get("api") ?? "";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
mountConsole(root, makeClient(api));
