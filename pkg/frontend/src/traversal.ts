/** Pathway traversal state: the clinician's position in the guideline
 * graph plus the breadcrumb of steps taken to get there.
 *
 * Options shown for the current node are always the server's latest
 * neighbor list; stepping along an edge the server no longer reports
 * (graph re-enriched mid-session) raises the stale flag instead of
 * moving.
 */

import { ApiClient, GraphNode, NeighborEntry } from './api.js';

export interface BreadcrumbStep {
  node: GraphNode;
  /** Relation taken to arrive here; null for the starting node. */
  relation: string | null;
}

export interface TraversalState {
  current: GraphNode | null;
  breadcrumb: BreadcrumbStep[];
  options: NeighborEntry[];
  pendingQuestion: string;
  staleEdge: boolean;
}

export const CATEGORY_BADGES: Record<string, string> = {
  DiseaseCondition: '#e377c2',
  TreatmentOption: '#2ca02c',
  Evaluation: '#c49c94',
};

export function badgeColor(category: string | null): string {
  return (category && CATEGORY_BADGES[category]) || '#7f7f7f';
}

export function emptyState(): TraversalState {
  return { current: null, breadcrumb: [], options: [], pendingQuestion: '', staleEdge: false };
}

export function breadcrumbNodeIds(state: TraversalState): string[] {
  return state.breadcrumb.map((step) => step.node.id);
}

/** Options grouped by relation type, preserving the server's ordering. */
export function groupByRelation(options: NeighborEntry[]): Map<string, NeighborEntry[]> {
  const groups = new Map<string, NeighborEntry[]>();
  for (const option of options) {
    const key = option.relation ?? 'unlabeled';
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(option);
    } else {
      groups.set(key, [option]);
    }
  }
  return groups;
}

export class Navigator {
  state: TraversalState = emptyState();

  constructor(private readonly api: ApiClient) {}

  async start(nodeId: string): Promise<TraversalState> {
    const node = await this.api.node(nodeId);
    const { neighbors } = await this.api.neighbors(nodeId);
    this.state = {
      current: node,
      breadcrumb: [{ node, relation: null }],
      options: neighbors,
      pendingQuestion: this.state.pendingQuestion,
      staleEdge: false,
    };
    return this.state;
  }

  /** Move along one of the currently offered edges. */
  async step(chosen: NeighborEntry): Promise<TraversalState> {
    const offered = this.state.options.find(
      (option) => option.node.id === chosen.node.id && option.relation === chosen.relation,
    );
    if (!offered) {
      this.state = { ...this.state, staleEdge: true };
      return this.state;
    }
    const { neighbors } = await this.api.neighbors(offered.node.id);
    this.state = {
      ...this.state,
      current: offered.node,
      breadcrumb: [...this.state.breadcrumb, { node: offered.node, relation: offered.relation }],
      options: neighbors,
      staleEdge: false,
    };
    return this.state;
  }

  /** Drop the last breadcrumb step and return to the previous node. */
  async back(): Promise<TraversalState> {
    if (this.state.breadcrumb.length <= 1) {
      return this.state;
    }
    const breadcrumb = this.state.breadcrumb.slice(0, -1);
    const current = breadcrumb[breadcrumb.length - 1]!.node;
    const { neighbors } = await this.api.neighbors(current.id);
    this.state = { ...this.state, current, breadcrumb, options: neighbors, staleEdge: false };
    return this.state;
  }

  /** Replay a server-returned path into the breadcrumb, step by step.
   * Each hop is validated against the live neighbor list, so the loaded
   * breadcrumb can only contain edges the server currently serves. */
  async loadPath(nodeIds: string[]): Promise<TraversalState> {
    if (nodeIds.length === 0) {
      return this.state;
    }
    await this.start(nodeIds[0]!);
    for (const nextId of nodeIds.slice(1)) {
      const option = this.state.options.find((candidate) => candidate.node.id === nextId);
      if (!option) {
        this.state = { ...this.state, staleEdge: true };
        return this.state;
      }
      await this.step(option);
    }
    return this.state;
  }

  setPendingQuestion(text: string): void {
    this.state = { ...this.state, pendingQuestion: text };
  }
}
