import { DashboardApp } from "./app";

// Base URL for the recommendation service; same origin by default,
// overridable with ?api=http://host:port for development setups.
const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
new DashboardApp(root, { baseUrl }).mount();
