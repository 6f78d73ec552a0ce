/**
 * Typed client for the meflex HTTP API.
 *
 * Every method maps to one endpoint. Error responses carry a
 * {code, message} envelope; they surface as ApiError so callers can
 * branch on the code (e.g. provider_error gets inline retry treatment).
 * The transport is injectable, which lets tests swap in a stub server.
 */

import type {
  ChangeSet,
  ChatRound,
  ExtensionKind,
  IdeaNode,
  MetaChatResult,
  MetaReflectionResult,
  Point,
  ProjectDoc,
  ProjectSummary,
  SectionDraft,
  SectionTag,
  TodoSummary,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

export interface CreateNodeBody {
  kind: ExtensionKind;
  parent_id?: string;
  position?: Point;
}

interface SectionPatch {
  content?: string;
  done?: boolean;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  // -- projects ---------------------------------------------------------

  createProject(title: string, topic: string): Promise<ProjectDoc> {
    return this.request("POST", "/projects", { title, topic });
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.request("GET", "/projects");
  }

  getProject(pid: string): Promise<ProjectDoc> {
    return this.request("GET", `/projects/${enc(pid)}`);
  }

  async listTopics(): Promise<string[]> {
    const body = await this.request<{ topics: string[] }>("GET", "/topics");
    return body.topics;
  }

  // -- nodes --------------------------------------------------------------

  createNode(pid: string, body: CreateNodeBody): Promise<IdeaNode> {
    return this.request("POST", `/projects/${enc(pid)}/nodes`, body);
  }

  getNode(pid: string, nid: string): Promise<IdeaNode> {
    return this.request("GET", `/projects/${enc(pid)}/nodes/${enc(nid)}`);
  }

  moveNode(pid: string, nid: string, position: Point): Promise<IdeaNode> {
    return this.request("PATCH", `/projects/${enc(pid)}/nodes/${enc(nid)}`, {
      position,
    });
  }

  async deleteNode(pid: string, nid: string): Promise<void> {
    await this.request("DELETE", `/projects/${enc(pid)}/nodes/${enc(nid)}`);
  }

  patchSection(
    pid: string,
    nid: string,
    section: SectionTag,
    patch: SectionPatch,
  ): Promise<SectionDraft & { node_id: string; section: SectionTag }> {
    return this.request(
      "PATCH",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/sections/${section}`,
      patch,
    );
  }

  // -- graph queries --------------------------------------------------------

  async getLineage(pid: string, nid: string): Promise<string[]> {
    const body = await this.request<{ lineage: string[] }>(
      "GET",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/lineage`,
    );
    return body.lineage;
  }

  diff(pid: string, fromId: string, toId: string): Promise<ChangeSet> {
    const q = `from=${enc(fromId)}&to=${enc(toId)}`;
    return this.request("GET", `/projects/${enc(pid)}/diff?${q}`);
  }

  getTodo(pid: string, nid: string): Promise<TodoSummary> {
    return this.request("GET", `/projects/${enc(pid)}/nodes/${enc(nid)}/todo`);
  }

  getChildren(
    pid: string,
    nid: string,
  ): Promise<Record<ExtensionKind, string[]>> {
    return this.request(
      "GET",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/children`,
    );
  }

  async exportMarkdown(pid: string, nid: string): Promise<string> {
    const body = await this.request<{ node_id: string; markdown: string }>(
      "GET",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/export`,
    );
    return body.markdown;
  }

  // -- chat -----------------------------------------------------------------

  sectionChat(
    pid: string,
    nid: string,
    section: SectionTag,
    message: string,
  ): Promise<ChatRound> {
    return this.request(
      "POST",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/sections/${section}/chat`,
      { message },
    );
  }

  generateMetaReflection(pid: string, nid: string): Promise<MetaReflectionResult> {
    return this.request(
      "POST",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/meta-reflection`,
    );
  }

  metaChat(pid: string, nid: string, message: string): Promise<MetaChatResult> {
    return this.request(
      "POST",
      `/projects/${enc(pid)}/nodes/${enc(nid)}/meta-reflection/chat`,
      { message },
    );
  }

  // -- transport --------------------------------------------------------

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      const detail = err instanceof Error ? err.message : String(err);
      throw new ApiError("network_error", `request failed: ${detail}`, 0);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    let parsed: unknown = null;
    try {
      parsed = await response.json();
    } catch {
      parsed = null;
    }
    if (!response.ok) {
      const envelope = parsed as { code?: string; message?: string } | null;
      throw new ApiError(
        envelope?.code ?? "http_error",
        envelope?.message ?? `HTTP ${response.status}`,
        response.status,
      );
    }
    return parsed as T;
  }
}

function enc(part: string): string {
  return encodeURIComponent(part);
}
