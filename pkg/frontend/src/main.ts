import { App } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  new App(root).start();
});
