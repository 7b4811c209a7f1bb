/** Single configuration point: where the guideline service lives. */

const DEFAULT_BASE_URL = 'http://127.0.0.1:8350';

export function resolveBaseUrl(explicit?: string): string {
  if (explicit) return explicit.replace(/\/+$/, '');
  if (typeof window !== 'undefined') {
    const fromQuery = new URLSearchParams(window.location.search).get('api');
    if (fromQuery) return fromQuery.replace(/\/+$/, '');
  }
  return DEFAULT_BASE_URL;
}
