import { ApiClient } from "./api.js";
import { startApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const apiBase =
  params.get("api") ?? `${window.location.protocol}//${window.location.hostname}:8008`;

startApp(new ApiClient(apiBase));
