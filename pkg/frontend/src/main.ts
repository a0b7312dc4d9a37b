/** DOM wiring for the query console; logic lives in api/state/render. */

import { ApiClient, QueryRejected, RequestFailed } from "./api.js";
import {
  PAGE_SIZE,
  pageCount,
  renderError,
  renderHistory,
  renderNetworkError,
  renderSchema,
  renderStats,
  renderTable,
} from "./render.js";
import { ConsoleState, initialState, recordFailure, recordNetworkError, recordResult } from "./state.js";

const api = new ApiClient("");
const state: ConsoleState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const sqlBox = el<HTMLTextAreaElement>("sql");
const runButton = el<HTMLButtonElement>("run");
const output = el<HTMLElement>("output");
const statsBox = el<HTMLElement>("stats");
const schemaBox = el<HTMLElement>("schema");
const historyBox = el<HTMLUListElement>("history");
const prevButton = el<HTMLButtonElement>("prev-page");
const nextButton = el<HTMLButtonElement>("next-page");

function redraw(): void {
  runButton.disabled = state.pending;
  if (state.networkError !== null) {
    output.innerHTML = renderNetworkError(state.networkError);
    statsBox.innerHTML = "";
  } else if (state.lastError !== null) {
    output.innerHTML = renderError(state.lastError);
    statsBox.innerHTML = "";
  } else if (state.lastResult !== null) {
    output.innerHTML = renderTable(state.lastResult, state.page, (p) => api.downloadUrl(p));
    statsBox.innerHTML = renderStats(state.lastResult);
  } else {
    output.innerHTML = '<div class="hint">enter a query and press Run</div>';
    statsBox.innerHTML = "";
  }
  const pages = state.lastResult ? pageCount(state.lastResult) : 1;
  prevButton.disabled = state.page <= 0;
  nextButton.disabled = state.page >= pages - 1;
  historyBox.innerHTML = renderHistory(state.history);
}

async function runQuery(): Promise<void> {
  if (state.pending) return; // one in-flight query at a time
  state.sql = sqlBox.value;
  state.pending = true;
  redraw();
  try {
    const result = await api.runQuery(state.sql);
    recordResult(state, result, Date.now());
  } catch (err) {
    if (err instanceof QueryRejected) {
      recordFailure(state, err.failure, Date.now());
    } else if (err instanceof RequestFailed) {
      recordNetworkError(state, err.message);
    } else {
      recordNetworkError(state, String(err));
    }
  } finally {
    state.pending = false;
    redraw();
  }
}

async function loadSchema(): Promise<void> {
  try {
    state.schema = await api.fetchTables();
    schemaBox.innerHTML = renderSchema(state.schema);
  } catch (err) {
    schemaBox.innerHTML = renderSchema([], `schema unavailable: ${String(err)}`);
  }
}

runButton.addEventListener("click", () => void runQuery());
sqlBox.addEventListener("keydown", (event) => {
  if ((event.ctrlKey || event.metaKey) && event.key === "Enter") {
    event.preventDefault();
    void runQuery();
  }
});
prevButton.addEventListener("click", () => {
  state.page = Math.max(0, state.page - 1);
  redraw();
});
nextButton.addEventListener("click", () => {
  state.page += 1;
  redraw();
});
historyBox.addEventListener("click", (event) => {
  const item = (event.target as HTMLElement).closest("li");
  if (item?.dataset.index !== undefined) {
    const entry = state.history[Number(item.dataset.index)];
    if (entry) {
      sqlBox.value = entry.sql;
      sqlBox.focus();
    }
  }
});

void loadSchema();
redraw();

export { PAGE_SIZE };
