/** Question panel: sends a question to the service and exposes exactly
 * what came back — the generated query (for transparency), the rendered
 * paragraphs verbatim, and the error classification when the pipeline
 * failed. No answer text is ever composed locally.
 */

import { AnswerPayload, ApiClient, ServiceError } from './api.js';

export type AskPhase = 'idle' | 'loading' | 'answered' | 'failed';

export interface AskPanelState {
  phase: AskPhase;
  question: string;
  /** Generated query text, shown verbatim. */
  query: string | null;
  /** Pipeline error classification (typeI/typeII/typeIII) or null. */
  errorType: string | null;
  answers: AnswerPayload[];
  /** Human message for transport/HTTP failures and error types. */
  message: string | null;
}

export function idleAskState(): AskPanelState {
  return { phase: 'idle', question: '', query: null, errorType: null, answers: [], message: null };
}

/** Quoted literals the query searches for (CONTAINS "..."), used to name
 * the unmatched content when the pipeline reports a matching error. */
export function containsLiterals(query: string): string[] {
  const literals: string[] = [];
  const pattern = /contains\s*(?:tolower\s*\(\s*)?("((?:[^"\\]|\\.)*)"|'((?:[^'\\]|\\.)*)')/gi;
  let match: RegExpExecArray | null;
  while ((match = pattern.exec(query)) !== null) {
    const raw = match[2] ?? match[3] ?? '';
    literals.push(raw.replace(/\\(["'\\])/g, '$1'));
  }
  return literals;
}

const ERROR_EXPLANATIONS: Record<string, string> = {
  typeI: 'The generated query has a syntax error and could not be run.',
  typeII: 'Content matching error: no guideline node contains the searched text.',
  typeIII: 'Connection length error: the path bounds are too tight for this graph.',
};

export function describeError(errorType: string, query: string | null): string {
  const base = ERROR_EXPLANATIONS[errorType] ?? `Pipeline error: ${errorType}.`;
  if (errorType === 'typeII' && query) {
    const literals = containsLiterals(query);
    if (literals.length > 0) {
      return `${base} Searched literal(s): ${literals.map((value) => `"${value}"`).join(', ')}.`;
    }
  }
  return base;
}

export function describeHttpFailure(error: unknown): string {
  if (error instanceof ServiceError) {
    if (error.status === 502) return `Completion service unavailable: ${error.body.error}`;
    if (error.status === 422) return `Query rejected by the engine: ${error.body.error}`;
    if (error.status === 400) return `Request rejected: ${error.body.error}`;
    if (error.status === 404) return `Not found: ${error.body.error}`;
    return `Service error ${error.status}: ${error.body.error}`;
  }
  return `Service unreachable: ${String(error)}`;
}

export class AskPanel {
  state: AskPanelState = idleAskState();

  constructor(private readonly api: ApiClient) {}

  async submit(question: string): Promise<AskPanelState> {
    this.state = { ...idleAskState(), phase: 'loading', question };
    try {
      const response = await this.api.ask(question);
      this.state = {
        phase: 'answered',
        question,
        query: response.query,
        errorType: response.error,
        answers: response.answers,
        message: response.error ? describeError(response.error, response.query) : null,
      };
    } catch (error) {
      this.state = {
        phase: 'failed',
        question,
        query: null,
        errorType: null,
        answers: [],
        message: describeHttpFailure(error),
      };
    }
    return this.state;
  }
}
