/** Typed client for the cnicloud HTTP API. */

export interface QueryStats {
  rows_scanned: number;
  body_resolutions: number;
  elapsed: number;
  row_count: number;
}

export interface QueryResult {
  columns: string[];
  rows: string[][];
  truncated: boolean;
  stats: QueryStats;
}

export interface QueryFailure {
  kind: string;
  position: number | null;
  message: string;
}

export interface TableInfo {
  name: string;
  columns: string[];
  row_count: number;
}

/** The server rejected the statement; `failure.message` is verbatim engine text. */
export class QueryRejected extends Error {
  constructor(public readonly failure: QueryFailure) {
    super(failure.message);
    this.name = "QueryRejected";
  }
}

/** The server could not be reached or answered outside the API contract. */
export class RequestFailed extends Error {
  constructor(message: string) {
    super(message);
    this.name = "RequestFailed";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async runQuery(sql: string, workers?: number): Promise<QueryResult> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/query`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(workers ? { sql, workers } : { sql }),
      });
    } catch (err) {
      throw new RequestFailed(`cannot reach server: ${String(err)}`);
    }
    if (response.status === 400) {
      throw new QueryRejected((await response.json()) as QueryFailure);
    }
    if (!response.ok) {
      throw new RequestFailed(`server error ${response.status}: ${await response.text()}`);
    }
    return (await response.json()) as QueryResult;
  }

  async fetchTables(): Promise<TableInfo[]> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/tables`);
    } catch (err) {
      throw new RequestFailed(`cannot reach server: ${String(err)}`);
    }
    if (!response.ok) {
      throw new RequestFailed(`server error ${response.status}`);
    }
    const payload = (await response.json()) as { tables: TableInfo[] };
    return payload.tables;
  }

  downloadUrl(path: string): string {
    return `${this.baseUrl}/download?path=${encodeURIComponent(path)}`;
  }
}
