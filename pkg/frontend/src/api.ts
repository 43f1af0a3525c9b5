/** Thin typed client for the townlet HTTP API.
 *
 * Every studio feature goes through this module; there is no other channel
 * to the backend. A PUT that fails semantic validation surfaces the server's
 * violation report as a `SaveRejected` so the editor can render it inline.
 */

import type {
  EventWindow,
  MapDocument,
  MapSaved,
  MapSummary,
  SnapshotResponse,
  TraceHeaderDetail,
  TraceSummary,
  ValidationReport,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export class SaveRejected extends Error {
  constructor(readonly report: ValidationReport) {
    super(`map rejected with ${report.violations.length} violation(s)`);
    this.name = "SaveRejected";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function detailOf(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return res.statusText || "request failed";
  }
}

export class StudioApi {
  private readonly fetch: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetch = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetch(`${this.baseUrl}${path}`);
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.getJson("/api/health");
  }

  listMaps(): Promise<MapSummary[]> {
    return this.getJson("/api/maps");
  }

  getMap(mapId: string): Promise<MapDocument> {
    return this.getJson(`/api/maps/${encodeURIComponent(mapId)}`);
  }

  /** Save a map document. 422 responses carry the server's validation
   * report and become `SaveRejected`; other failures become `ApiError`. */
  async saveMap(mapId: string, doc: MapDocument): Promise<MapSaved> {
    const res = await this.fetch(`${this.baseUrl}/api/maps/${encodeURIComponent(mapId)}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    if (res.status === 422) {
      throw new SaveRejected((await res.json()) as ValidationReport);
    }
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return (await res.json()) as MapSaved;
  }

  listTraces(): Promise<TraceSummary[]> {
    return this.getJson("/api/traces");
  }

  traceHeader(traceId: string): Promise<TraceHeaderDetail> {
    return this.getJson(`/api/traces/${encodeURIComponent(traceId)}/header`);
  }

  /** Events with from <= tick <= to, in recorded order. */
  traceEvents(traceId: string, fromTick: number, toTick: number): Promise<EventWindow> {
    const id = encodeURIComponent(traceId);
    return this.getJson(`/api/traces/${id}/events?from=${fromTick}&to=${toTick}`);
  }

  traceSnapshot(traceId: string, tick: number): Promise<SnapshotResponse> {
    const id = encodeURIComponent(traceId);
    return this.getJson(`/api/traces/${id}/snapshot/${tick}`);
  }
}
