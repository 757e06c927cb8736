import { initApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
initApp(root).catch((error) => {
  root.textContent = `Failed to load the factor catalog: ${error}`;
});
