/**
 * Service origin. The build injects the RCVAR_API_BASE environment value
 * into a global in index.html; an empty base means same-origin requests.
 */

declare global {
  // eslint-disable-next-line no-var
  var RCVAR_API_BASE: string | undefined;
}

export function apiBase(): string {
  return globalThis.RCVAR_API_BASE ?? "";
}
