/**
 * Center pane: the structured writing workspace.
 *
 * Lists the seven plan sections as a to-do list with status badges.
 * Selecting a section opens its editor and binds the chat pane to that
 * section's agent thread. All edits wait for the server; the badge state
 * shown always comes from the last fetched document.
 */

import { clear, el } from "./dom";
import type { IdeaNode, ProjectDoc, SectionStatus, SectionTag } from "./types";
import { SECTIONS } from "./types";

export interface WorkspaceCallbacks {
  onSelectSection(tag: SectionTag): void;
  onSaveSection(tag: SectionTag, content: string): void;
  onToggleDone(tag: SectionTag, done: boolean): void;
  onDiscussMeta(): void;
  onExport(): void;
}

const STATUS_LABELS: Record<SectionStatus, string> = {
  empty: "Empty",
  in_progress: "In progress",
  done: "Done",
};

export class WorkspacePanel {
  readonly element: HTMLElement;
  private readonly callbacks: WorkspaceCallbacks;

  constructor(callbacks: WorkspaceCallbacks) {
    this.callbacks = callbacks;
    this.element = el("section", { class: "workspace-pane" });
  }

  render(
    project: ProjectDoc | null,
    node: IdeaNode | null,
    openSection: SectionTag | null,
    showFreshMeta: boolean,
  ): void {
    clear(this.element);
    if (!project || !node) {
      this.element.appendChild(
        el("p", {
          class: "workspace-hint",
          text: "Double-click a card on the canvas to open its plan.",
        }),
      );
      return;
    }

    this.element.appendChild(
      el("header", { class: "workspace-head" }, [
        el("h2", { text: project.title }),
        el("button", {
          class: "export-plan",
          text: "Export Markdown",
          onClick: () => this.callbacks.onExport(),
        }),
      ]),
    );

    if (showFreshMeta && node.meta_reflection) {
      this.element.appendChild(
        el("aside", { class: "meta-banner" }, [
          el("div", { class: "meta-banner-label", text: "How this version shifted" }),
          el("p", { class: "meta-banner-text", text: node.meta_reflection }),
          el("button", {
            class: "meta-discuss",
            text: "Discuss",
            onClick: () => this.callbacks.onDiscussMeta(),
          }),
        ]),
      );
    }

    const list = el("ul", { class: "section-list" });
    for (const info of SECTIONS) {
      const draft = node.sections[info.tag];
      const row = el(
        "li",
        {
          class:
            info.tag === openSection ? "section-row open" : "section-row",
          dataset: { section: info.tag },
          onClick: () => this.callbacks.onSelectSection(info.tag),
        },
        [
          el("span", { class: "section-title", text: info.title }),
          el("span", {
            class: `badge badge-${draft.status}`,
            text: STATUS_LABELS[draft.status],
          }),
        ],
      );
      list.appendChild(row);
    }
    this.element.appendChild(list);

    if (openSection) {
      this.element.appendChild(this.renderEditor(node, openSection));
    }
  }

  private renderEditor(node: IdeaNode, tag: SectionTag): HTMLElement {
    const draft = node.sections[tag];
    const input = el("textarea", {
      class: "section-editor-input",
      value: draft.content,
      placeholder: "Draft this section...",
    });
    const isDone = draft.status === "done";
    return el("div", { class: "section-editor", dataset: { section: tag } }, [
      input,
      el("div", { class: "section-editor-actions" }, [
        el("button", {
          class: "section-save",
          text: "Save",
          onClick: () => this.callbacks.onSaveSection(tag, input.value),
        }),
        el("button", {
          class: "section-done-toggle",
          text: isDone ? "Mark in progress" : "Mark done",
          onClick: () => this.callbacks.onToggleDone(tag, !isDone),
        }),
      ]),
    ]);
  }
}
