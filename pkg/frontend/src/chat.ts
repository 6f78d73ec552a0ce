/**
 * Right pane: the assistant chat.
 *
 * Binds to the selected node's section thread, or to its meta-reflection
 * discussion. Each successful section round shows three bubbles: the user
 * message, the agent reply, and a highlighted reflection question. The
 * reflection bubble carries a "Branch from here" action. Provider failures
 * render inline with a retry button; the thread itself never changes on
 * failure because the server commits rounds atomically.
 */

import { clear, el } from "./dom";
import type { ChatMessage, IdeaNode, SectionTag } from "./types";
import { sectionTitle, threadFor } from "./types";

export type ChatBinding =
  | { kind: "section"; section: SectionTag }
  | { kind: "meta" };

export interface ChatRenderOptions {
  pending: boolean;
  error: string | null;
  failedMessage: string | null;
}

export interface ChatPanelCallbacks {
  onSend(text: string): void;
  onBranchFromHere(): void;
}

export class ChatPanel {
  readonly element: HTMLElement;
  private readonly callbacks: ChatPanelCallbacks;

  constructor(callbacks: ChatPanelCallbacks) {
    this.callbacks = callbacks;
    this.element = el("section", { class: "chat-pane" });
  }

  render(
    node: IdeaNode | null,
    binding: ChatBinding | null,
    options: ChatRenderOptions,
  ): void {
    clear(this.element);
    if (!node || !binding) {
      this.element.appendChild(
        el("p", {
          class: "chat-hint",
          text: "Pick a section to talk with its agent.",
        }),
      );
      return;
    }

    const headerText =
      binding.kind === "section"
        ? `${sectionTitle(binding.section)} agent`
        : "Meta-reflection discussion";
    this.element.appendChild(
      el("header", { class: "chat-header", text: headerText }),
    );

    const thread =
      binding.kind === "section"
        ? threadFor(node, binding.section)
        : node.meta_thread;
    const log = el("div", { class: "chat-thread" });
    for (const message of thread) {
      log.appendChild(this.renderBubble(message));
    }
    if (thread.length === 0) {
      log.appendChild(
        el("p", {
          class: "chat-empty",
          text:
            binding.kind === "section"
              ? "No messages yet. Ask the agent for guidance."
              : "Discuss how this version differs from its parent.",
        }),
      );
    }
    this.element.appendChild(log);

    if (options.error) {
      const retry = el("button", { class: "chat-retry", text: "Retry" });
      if (options.failedMessage) {
        const failed = options.failedMessage;
        retry.addEventListener("click", () => this.callbacks.onSend(failed));
      } else {
        retry.disabled = true;
      }
      this.element.appendChild(
        el("div", { class: "chat-error" }, [
          el("span", { text: options.error }),
          retry,
        ]),
      );
    }

    const input = el("textarea", {
      class: "chat-input",
      placeholder:
        binding.kind === "section"
          ? "Ask about this section..."
          : "Ask about this shift...",
    });
    const send = el("button", {
      class: "chat-send",
      text: options.pending ? "Waiting..." : "Send",
      disabled: options.pending,
      onClick: () => {
        const text = input.value.trim();
        if (!text) return;
        input.value = "";
        this.callbacks.onSend(text);
      },
    });
    this.element.appendChild(
      el("footer", { class: "chat-input-row" }, [input, send]),
    );
  }

  private renderBubble(message: ChatMessage): HTMLElement {
    if (message.role === "reflection_question") {
      return el("div", { class: "bubble bubble-reflection" }, [
        el("span", { class: "bubble-label", text: "Reflection" }),
        el("p", { text: message.content }),
        el("button", {
          class: "branch-here",
          text: "Branch from here",
          onClick: () => this.callbacks.onBranchFromHere(),
        }),
      ]);
    }
    const cls =
      message.role === "user" ? "bubble bubble-user" : "bubble bubble-assistant";
    return el("div", { class: cls }, [el("p", { text: message.content })]);
  }
}
