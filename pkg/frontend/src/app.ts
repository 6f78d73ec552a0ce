/**
 * Composition root for the three-pane client.
 *
 * Owns the last fetched project document and re-fetches it after every
 * mutation, so the server stays the single source of truth. The only
 * optimistic update is a card drag; everything else waits for the API.
 */

import { ApiClient, ApiError } from "./api";
import { CanvasPanel } from "./canvas";
import { ChatPanel, type ChatBinding } from "./chat";
import { clear, el } from "./dom";
import { chatOpTag, ViewStateStore } from "./state";
import { ToastHost } from "./toast";
import type { Point, ProjectDoc, SectionTag } from "./types";
import { WorkspacePanel } from "./workspace";

interface ChatFailure {
  message: string;
  failedMessage: string;
}

export class App {
  readonly element: HTMLElement;
  readonly store: ViewStateStore;
  private readonly api: ApiClient;
  private readonly canvas: CanvasPanel;
  private readonly workspace: WorkspacePanel;
  private readonly chat: ChatPanel;
  private readonly toasts: ToastHost;
  private project: ProjectDoc | null = null;
  private workspaceOpen = false;
  private metaMode = false;
  private freshMetaId: string | null = null;
  private chatFailures = new Map<string, ChatFailure>();

  constructor(api: ApiClient) {
    this.api = api;
    this.store = new ViewStateStore();
    this.toasts = new ToastHost();
    this.canvas = new CanvasPanel({
      onSelect: (id) => this.selectNode(id),
      onOpen: (id) => this.openNode(id),
      onMove: (id, pos) => void this.moveNode(id, pos),
      onCreateRoot: () => void this.createRoot(),
      onExtend: (id, kind) => void this.extendNode(id, kind),
      onDiscussMeta: (id) => this.discussMeta(id),
    });
    this.workspace = new WorkspacePanel({
      onSelectSection: (tag) => this.openSection(tag),
      onSaveSection: (tag, content) => void this.saveSection(tag, content),
      onToggleDone: (tag, done) => void this.toggleDone(tag, done),
      onDiscussMeta: () => {
        const id = this.store.snapshot().selectedNode;
        if (id) this.discussMeta(id);
      },
      onExport: () => void this.exportPlan(),
    });
    this.chat = new ChatPanel({
      onSend: (text) => void this.sendChat(text),
      onBranchFromHere: () => {
        const id = this.store.snapshot().selectedNode;
        if (id) void this.extendNode(id, "branch");
      },
    });
    this.element = el("div", { class: "app-shell" }, [
      this.canvas.element,
      this.workspace.element,
      this.chat.element,
      this.toasts.element,
    ]);
  }

  async open(projectId: string): Promise<void> {
    this.project = await this.api.getProject(projectId);
    const firstId = Object.keys(this.project.nodes)[0] ?? null;
    this.store.selectNode(firstId);
    this.render();
  }

  /** Latest fetched document; tests use it to cross-check the render. */
  currentProject(): ProjectDoc | null {
    return this.project;
  }

  render(): void {
    if (!this.project) return;
    const view = this.store.snapshot();
    const openedNode =
      this.workspaceOpen && view.selectedNode
        ? this.project.nodes[view.selectedNode] ?? null
        : null;
    const binding = this.currentBinding();
    const tag = this.currentChatTag();
    const failure = tag ? this.chatFailures.get(tag) ?? null : null;
    this.canvas.render(this.project, view.selectedNode, this.freshMetaId);
    this.workspace.render(
      this.project,
      openedNode,
      view.openSection,
      openedNode !== null && openedNode.id === this.freshMetaId,
    );
    this.chat.render(openedNode, binding, {
      pending: tag !== null && view.pending.has(tag),
      error: failure?.message ?? null,
      failedMessage: failure?.failedMessage ?? null,
    });
  }

  // -- selection ------------------------------------------------------------

  private selectNode(id: string): void {
    const previous = this.store.snapshot().selectedNode;
    this.store.selectNode(id);
    if (previous !== id) {
      this.workspaceOpen = false;
      this.metaMode = false;
    }
    this.render();
  }

  private openNode(id: string): void {
    if (!this.project || !this.project.nodes[id]) {
      this.toasts.show("That card no longer exists.");
      this.render();
      return;
    }
    this.store.selectNode(id);
    this.workspaceOpen = true;
    this.metaMode = false;
    this.render();
  }

  private openSection(tag: SectionTag): void {
    this.store.setOpenSection(tag);
    this.metaMode = false;
    this.render();
  }

  private discussMeta(id: string): void {
    this.store.selectNode(id);
    this.workspaceOpen = true;
    this.metaMode = true;
    this.render();
  }

  // -- mutations ------------------------------------------------------------

  private async createRoot(): Promise<void> {
    if (!this.project) return;
    try {
      const node = await this.api.createNode(this.project.id, { kind: "root" });
      await this.refresh();
      this.store.selectNode(node.id);
    } catch (err) {
      this.surface(err);
    }
    this.render();
  }

  private async extendNode(
    parentId: string,
    kind: "refinement" | "branch",
  ): Promise<void> {
    if (!this.project) return;
    const pid = this.project.id;
    let childId: string;
    try {
      const child = await this.api.createNode(pid, {
        kind,
        parent_id: parentId,
      });
      childId = child.id;
      await this.refresh();
    } catch (err) {
      this.surface(err);
      this.render();
      return;
    }
    this.store.selectNode(childId);
    this.workspaceOpen = true;
    this.metaMode = false;
    this.render();
    void this.generateMeta(pid, childId);
  }

  private async generateMeta(pid: string, nodeId: string): Promise<void> {
    const tag = `meta-gen:${nodeId}`;
    if (!this.store.begin(tag)) return;
    try {
      await this.api.generateMetaReflection(pid, nodeId);
      await this.refresh();
      this.freshMetaId = nodeId;
    } catch (err) {
      // Best effort: a provider outage just leaves the segment absent.
      if (!(err instanceof ApiError && err.code === "provider_error")) {
        this.surface(err);
      }
    } finally {
      this.store.end(tag);
    }
    this.render();
  }

  private async moveNode(id: string, position: Point): Promise<void> {
    if (!this.project) return;
    try {
      await this.api.moveNode(this.project.id, id, position);
    } catch (err) {
      this.surface(err);
    }
    await this.refresh();
    this.render();
  }

  private async saveSection(tag: SectionTag, content: string): Promise<void> {
    await this.patchSection(tag, { content });
  }

  private async toggleDone(tag: SectionTag, done: boolean): Promise<void> {
    await this.patchSection(tag, { done });
  }

  private async patchSection(
    tag: SectionTag,
    patch: { content?: string; done?: boolean },
  ): Promise<void> {
    const view = this.store.snapshot();
    if (!this.project || !view.selectedNode) return;
    try {
      await this.api.patchSection(this.project.id, view.selectedNode, tag, patch);
    } catch (err) {
      this.surface(err);
    }
    await this.refresh();
    this.render();
  }

  private async sendChat(text: string): Promise<void> {
    const view = this.store.snapshot();
    const binding = this.currentBinding();
    const tag = this.currentChatTag();
    if (!this.project || !view.selectedNode || !binding || !tag) return;
    if (!this.store.begin(tag)) return;
    this.chatFailures.delete(tag);
    this.render();
    try {
      if (binding.kind === "section") {
        await this.api.sectionChat(
          this.project.id,
          view.selectedNode,
          binding.section,
          text,
        );
      } else {
        await this.api.metaChat(this.project.id, view.selectedNode, text);
      }
    } catch (err) {
      const message =
        err instanceof ApiError
          ? `The assistant is unavailable: ${err.message}`
          : "The assistant is unavailable.";
      this.chatFailures.set(tag, { message, failedMessage: text });
    } finally {
      this.store.end(tag);
    }
    await this.refresh();
    this.render();
  }

  private async exportPlan(): Promise<void> {
    const view = this.store.snapshot();
    if (!this.project || !view.selectedNode) return;
    try {
      const markdown = await this.api.exportMarkdown(
        this.project.id,
        view.selectedNode,
      );
      this.showExport(markdown);
    } catch (err) {
      this.surface(err);
    }
  }

  // -- plumbing ---------------------------------------------------------

  private currentBinding(): ChatBinding | null {
    const view = this.store.snapshot();
    if (!this.workspaceOpen || !view.selectedNode) return null;
    if (this.metaMode) return { kind: "meta" };
    if (view.openSection) return { kind: "section", section: view.openSection };
    return null;
  }

  private currentChatTag(): string | null {
    const view = this.store.snapshot();
    const binding = this.currentBinding();
    if (!binding || !view.selectedNode) return null;
    return chatOpTag(
      view.selectedNode,
      binding.kind === "meta" ? "meta" : binding.section,
    );
  }

  private async refresh(): Promise<void> {
    if (!this.project) return;
    this.project = await this.api.getProject(this.project.id);
    const view = this.store.snapshot();
    if (view.selectedNode && !this.project.nodes[view.selectedNode]) {
      this.store.selectNode(null);
      this.workspaceOpen = false;
      this.metaMode = false;
    }
    if (this.freshMetaId && !this.project.nodes[this.freshMetaId]) {
      this.freshMetaId = null;
    }
  }

  private surface(err: unknown): void {
    const message =
      err instanceof ApiError
        ? err.message
        : err instanceof Error
          ? err.message
          : String(err);
    this.toasts.show(message);
  }

  private showExport(markdown: string): void {
    const overlay = el("div", { class: "export-overlay" });
    const pre = el("pre", { class: "export-markdown", text: markdown });
    overlay.appendChild(
      el("div", { class: "export-box" }, [
        el("button", {
          class: "export-close",
          text: "Close",
          onClick: () => overlay.remove(),
        }),
        pre,
      ]),
    );
    this.element.appendChild(overlay);
  }
}

export function mountApp(root: HTMLElement, api: ApiClient): App {
  const app = new App(api);
  clear(root);
  root.appendChild(app.element);
  return app;
}
