/** Typed client for the guideline service HTTP API.
 *
 * Every piece of text the UI shows comes from these payloads verbatim;
 * the client never rewrites server strings.
 */

export type Category = 'DiseaseCondition' | 'TreatmentOption' | 'Evaluation' | null;

export interface GraphNode {
  id: string;
  content: string;
  context: string | null;
  category: Category;
  page: string | null;
}

export interface NeighborEntry {
  relation: string | null;
  node: GraphNode;
}

export interface NeighborsResponse {
  direction: 'out' | 'in';
  neighbors: NeighborEntry[];
}

export interface PathValue {
  nodes: string[];
  relations: (string | null)[];
}

export interface QueryResponse {
  columns: string[];
  rows: unknown[][];
}

export interface AnswerPayload {
  nodeIds: string[];
  text: string;
  fallbackUsed: boolean;
}

export interface AskResponse {
  query: string;
  error: string | null;
  answers: AnswerPayload[];
}

export interface StatsResponse {
  nodes: Record<string, number>;
  edges: Record<string, number>;
}

export interface ServiceErrorBody {
  error: string;
  position?: number;
  expected?: string[];
}

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ServiceErrorBody,
  ) {
    super(`${status}: ${body.error}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    let payload: unknown;
    try {
      payload = JSON.parse(text);
    } catch {
      throw new ServiceError(response.status, { error: `invalid response body: ${text.slice(0, 80)}` });
    }
    if (!response.ok) {
      throw new ServiceError(response.status, payload as ServiceErrorBody);
    }
    return payload as T;
  }

  stats(): Promise<StatsResponse> {
    return this.request<StatsResponse>('/graph/stats');
  }

  node(id: string): Promise<GraphNode> {
    return this.request<GraphNode>(`/node/${encodeURIComponent(id)}`);
  }

  neighbors(id: string, direction: 'out' | 'in' = 'out'): Promise<NeighborsResponse> {
    return this.request<NeighborsResponse>(
      `/node/${encodeURIComponent(id)}/neighbors?direction=${direction}`,
    );
  }

  query(cql: string): Promise<QueryResponse> {
    return this.request<QueryResponse>('/query', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ cql }),
    });
  }

  ask(question: string): Promise<AskResponse> {
    return this.request<AskResponse>('/ask', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ question }),
    });
  }
}

/** First path value in a query response, if any column carries one. */
export function firstPath(response: QueryResponse): PathValue | null {
  for (const row of response.rows) {
    for (const value of row) {
      if (
        value !== null &&
        typeof value === 'object' &&
        !Array.isArray(value) &&
        'nodes' in (value as Record<string, unknown>) &&
        'relations' in (value as Record<string, unknown>)
      ) {
        return value as PathValue;
      }
    }
  }
  return null;
}
