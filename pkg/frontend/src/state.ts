/** Session-local console state: current statement, last outcome, history. */

import type { QueryFailure, QueryResult, TableInfo } from "./api.js";

export const HISTORY_LIMIT = 50;

export interface HistoryEntry {
  readonly sql: string;
  readonly ok: boolean;
  readonly at: number; // epoch ms
}

export interface ConsoleState {
  sql: string;
  pending: boolean;
  lastResult: QueryResult | null;
  lastError: QueryFailure | null;
  networkError: string | null;
  history: readonly HistoryEntry[];
  schema: TableInfo[];
  page: number;
}

export function initialState(): ConsoleState {
  return {
    sql: "",
    pending: false,
    lastResult: null,
    lastError: null,
    networkError: null,
    history: [],
    schema: [],
    page: 0,
  };
}

export function pushHistory(
  history: readonly HistoryEntry[],
  sql: string,
  ok: boolean,
  at: number,
): readonly HistoryEntry[] {
  const entry: HistoryEntry = Object.freeze({ sql, ok, at });
  return Object.freeze([entry, ...history].slice(0, HISTORY_LIMIT));
}

export function recordResult(state: ConsoleState, result: QueryResult, at: number): void {
  state.lastResult = result;
  state.lastError = null;
  state.networkError = null;
  state.page = 0;
  state.history = pushHistory(state.history, state.sql, true, at);
}

export function recordFailure(state: ConsoleState, failure: QueryFailure, at: number): void {
  state.lastResult = null;
  state.lastError = failure;
  state.networkError = null;
  state.history = pushHistory(state.history, state.sql, false, at);
}

export function recordNetworkError(state: ConsoleState, message: string): void {
  // Connection trouble is not a query outcome: history stays unchanged.
  state.networkError = message;
}
