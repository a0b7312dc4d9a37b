import { describe, expect, it } from "vitest";

import type { QueryResult } from "../src/api.js";
import {
  PAGE_SIZE,
  escapeHtml,
  isPathColumn,
  pageCount,
  renderError,
  renderHistory,
  renderSchema,
  renderTable,
} from "../src/render.js";

const download = (p: string) => `/download?path=${encodeURIComponent(p)}`;

function result(columns: string[], rows: string[][], truncated = false): QueryResult {
  return {
    columns,
    rows,
    truncated,
    stats: {
      rows_scanned: rows.length,
      body_resolutions: 0,
      elapsed: 0,
      row_count: rows.length,
    },
  };
}

describe("escaping", () => {
  it("escapes markup in cells", () => {
    const html = renderTable(result(["MsgType"], [["<script>alert(1)</script>"]]), 0, download);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("escapeHtml covers the five specials", () => {
    expect(escapeHtml(`&<>"'`)).toBe("&amp;&lt;&gt;&quot;&#39;");
  });
});

describe("path cells", () => {
  it("identifies path columns including join-qualified ones", () => {
    expect(isPathColumn("Filepath")).toBe(true);
    expect(isPathColumn("MsgPath")).toBe(true);
    expect(isPathColumn("tMsg.Filepath")).toBe(true);
    expect(isPathColumn("tFile.Filepath")).toBe(true);
    expect(isPathColumn("MsgType")).toBe(false);
    expect(isPathColumn("MsgHash")).toBe(false);
  });

  it("renders Filepath and MsgPath cells as download links", () => {
    const html = renderTable(
      result(["Filepath", "MsgType"], [["/data/a b.log", "4G_LTE_RRC"]]),
      0,
      download,
    );
    expect(html).toContain('href="/download?path=%2Fdata%2Fa%20b.log"');
    expect(html).toContain("download>");
    // Non-path cells stay plain text.
    expect(html).toContain("<td>4G_LTE_RRC</td>");
  });
});

describe("pagination", () => {
  it("renders only one page of a 10,000-row result", () => {
    const rows = Array.from({ length: 10_000 }, (_, i) => [String(i)]);
    const big = result(["LineNo"], rows, true);
    const html = renderTable(big, 0, download);
    expect((html.match(/<tr>/g) ?? []).length).toBe(PAGE_SIZE + 1); // head + page
    expect(pageCount(big)).toBe(Math.ceil(10_000 / PAGE_SIZE));
    expect(html).toContain("truncated");
    const last = renderTable(big, pageCount(big) - 1, download);
    expect(last).toContain("<td>9999</td>");
  });

  it("clamps out-of-range pages", () => {
    const one = result(["A"], [["x"]]);
    expect(renderTable(one, 99, download)).toContain("<td>x</td>");
  });
});

describe("errors", () => {
  it("shows the server message verbatim (snapshot against server fixture)", () => {
    // Captured from POST /query with sql="SELEKT x".
    const failure = {
      kind: "SyntaxError",
      position: 1,
      message: "syntax error at position 1: expected SELECT, found 'SELEKT'",
    };
    const html = renderError(failure);
    expect(html).toContain(
      "syntax error at position 1: expected SELECT, found &#39;SELEKT&#39;",
    );
    expect(html).toContain("SyntaxError");
    expect(html).toContain("@1");
  });

  it("renders BlankQuery without a position marker", () => {
    const html = renderError({
      kind: "BlankQuery",
      position: null,
      message: "blank query: statement contains only whitespace",
    });
    expect(html).toContain("blank query: statement contains only whitespace");
    expect(html).not.toContain("@");
  });
});

describe("schema and history", () => {
  it("renders tables with live row counts", () => {
    const html = renderSchema([
      { name: "tFile", columns: ["Filepath", "Phone"], row_count: 2 },
      { name: "tMsg", columns: ["Filepath", "LineNo"], row_count: 10 },
    ]);
    expect(html).toContain("tFile");
    expect(html).toContain("10 rows");
    expect(html).toContain("<li>LineNo</li>");
  });

  it("renders an empty-sidebar notice when the server is down", () => {
    const html = renderSchema([], "schema unavailable: fetch failed");
    expect(html).toContain("schema unavailable");
  });

  it("truncates long history entries", () => {
    const html = renderHistory([{ sql: "S".repeat(120), ok: true }]);
    expect(html).toContain("...");
    expect(html).toContain('class="ok"');
  });
});
