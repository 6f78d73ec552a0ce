/** Build-time configuration. */

export function apiBaseUrl(): string {
  const fromEnv = import.meta.env?.VITE_API_BASE as string | undefined;
  return fromEnv ?? "http://127.0.0.1:8787";
}
