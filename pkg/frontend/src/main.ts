/** Browser entry point: mount the console on #app. */

import { ConsoleApp } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const app = new ConsoleApp(root);
void app.init();
