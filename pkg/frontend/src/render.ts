/** Pure HTML rendering; all user data is escaped, error text shown verbatim.
 *
 * Results render one page at a time (PAGE_SIZE rows) so a 10,000-row
 * truncated result never freezes the input box.
 */

import type { QueryFailure, QueryResult, TableInfo } from "./api.js";

export const PAGE_SIZE = 200;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Columns whose cells are paths into the server's data directory. */
export function isPathColumn(name: string): boolean {
  return name === "Filepath" || name === "MsgPath" || name.endsWith(".Filepath");
}

export function pageCount(result: QueryResult): number {
  return Math.max(1, Math.ceil(result.rows.length / PAGE_SIZE));
}

export function renderCell(
  column: string,
  value: string,
  downloadUrl: (path: string) => string,
): string {
  if (isPathColumn(column) && value !== "") {
    return (
      `<a class="download" href="${escapeHtml(downloadUrl(value))}"` +
      ` download>${escapeHtml(value)}</a>`
    );
  }
  return escapeHtml(value);
}

export function renderTable(
  result: QueryResult,
  page: number,
  downloadUrl: (path: string) => string,
): string {
  const pages = pageCount(result);
  const current = Math.min(Math.max(page, 0), pages - 1);
  const start = current * PAGE_SIZE;
  const visible = result.rows.slice(start, start + PAGE_SIZE);
  const head = result.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = visible
    .map(
      (row) =>
        "<tr>" +
        row
          .map((cell, i) => `<td>${renderCell(result.columns[i], cell, downloadUrl)}</td>`)
          .join("") +
        "</tr>",
    )
    .join("");
  const banner = result.truncated
    ? `<div class="banner truncated">result truncated to ${result.rows.length} rows;` +
      ` refine the query or download the source logs</div>`
    : "";
  const pager =
    pages > 1
      ? `<div class="pager">page ${current + 1} of ${pages}` +
        ` (${result.rows.length} rows)</div>`
      : "";
  return (
    banner +
    `<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>` +
    pager
  );
}

export function renderStats(result: QueryResult): string {
  const s = result.stats;
  return (
    `<div class="stats">${s.row_count} row(s); scanned ${s.rows_scanned};` +
    ` resolved ${s.body_resolutions} bodies; ${(s.elapsed * 1000).toFixed(1)} ms</div>`
  );
}

export function renderError(failure: QueryFailure): string {
  const where = failure.position === null ? "" : ` <span class="pos">@${failure.position}</span>`;
  return (
    `<div class="banner error"><span class="kind">${escapeHtml(failure.kind)}</span>${where}` +
    `<pre class="message">${escapeHtml(failure.message)}</pre></div>`
  );
}

export function renderNetworkError(message: string): string {
  return `<div class="banner network">connection problem: ${escapeHtml(message)}</div>`;
}

export function renderSchema(tables: TableInfo[], notice = ""): string {
  if (tables.length === 0) {
    return `<div class="schema-empty">${escapeHtml(notice || "no schema loaded")}</div>`;
  }
  return tables
    .map(
      (t) =>
        `<div class="table"><div class="table-name">${escapeHtml(t.name)}` +
        ` <span class="rows">${t.row_count} rows</span></div><ul>` +
        t.columns.map((c) => `<li>${escapeHtml(c)}</li>`).join("") +
        "</ul></div>",
    )
    .join("");
}

export function renderHistory(entries: readonly { sql: string; ok: boolean }[]): string {
  return entries
    .map(
      (e, i) =>
        `<li data-index="${i}" class="${e.ok ? "ok" : "failed"}">` +
        `${escapeHtml(e.sql.length > 80 ? e.sql.slice(0, 77) + "..." : e.sql)}</li>`,
    )
    .join("");
}
