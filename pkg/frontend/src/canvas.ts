/**
 * Left pane: the idea canvas.
 *
 * One card per node, placed by the pure layout function. Cards show a
 * version title, section progress, and the meta-reflection segment when
 * the node has one. Dragging a card is the only optimistic mutation:
 * the element follows the pointer immediately and the new position is
 * reported on drop for the server round-trip.
 */

import { CARD_H, CARD_W, computeLayout, contentBounds } from "./layout";
import { clear, el, svgEl } from "./dom";
import type { IdeaNode, Point, ProjectDoc } from "./types";
import { doneCount, SECTIONS } from "./types";

export interface CanvasCallbacks {
  onSelect(id: string): void;
  onOpen(id: string): void;
  onMove(id: string, position: Point): void;
  onCreateRoot(): void;
  onExtend(id: string, kind: "refinement" | "branch"): void;
  onDiscussMeta(id: string): void;
}

const KIND_LABELS = { root: "Root", refinement: "Refinement", branch: "Branch" };

const DRAG_THRESHOLD_PX = 4;

interface DragState {
  nodeId: string;
  startClientX: number;
  startClientY: number;
  originX: number;
  originY: number;
  moved: boolean;
  element: HTMLElement;
}

interface PanState {
  startClientX: number;
  startClientY: number;
  originX: number;
  originY: number;
}

export class CanvasPanel {
  readonly element: HTMLElement;
  private readonly world: HTMLElement;
  private readonly callbacks: CanvasCallbacks;
  private layout = new Map<string, Point>();
  private pan: Point = { x: 40, y: 40 };
  private zoom = 1;
  private drag: DragState | null = null;
  private panning: PanState | null = null;

  constructor(callbacks: CanvasCallbacks) {
    this.callbacks = callbacks;
    this.world = el("div", { class: "canvas-world" });
    this.element = el("div", { class: "canvas-pane" }, [this.world]);
    this.applyTransform();
    this.bindGestures();
  }

  render(
    project: ProjectDoc,
    selectedId: string | null,
    freshMetaId: string | null,
  ): void {
    this.layout = computeLayout(project);
    clear(this.world);

    const ids = Object.keys(project.nodes);
    if (ids.length === 0) {
      this.world.appendChild(
        el("div", { class: "canvas-empty" }, [
          el("p", { text: "This project has no idea cards yet." }),
          el("button", {
            class: "create-idea",
            text: "Create idea",
            onClick: () => this.callbacks.onCreateRoot(),
          }),
        ]),
      );
      return;
    }

    this.world.appendChild(this.renderEdges(project));
    ids.forEach((id, index) => {
      const node = project.nodes[id];
      const pos = this.layout.get(id);
      if (!pos) return;
      this.world.appendChild(
        this.renderCard(node, index, pos, id === selectedId, id === freshMetaId),
      );
    });
  }

  /** Current placement, exposed so other panes can focus a card. */
  positionOf(id: string): Point | undefined {
    return this.layout.get(id);
  }

  centerOn(id: string): void {
    const pos = this.layout.get(id);
    if (!pos) return;
    const rect = this.element.getBoundingClientRect();
    this.pan = {
      x: rect.width / 2 - (pos.x + CARD_W / 2) * this.zoom,
      y: rect.height / 2 - (pos.y + CARD_H / 2) * this.zoom,
    };
    this.applyTransform();
  }

  fitToContent(): void {
    const bounds = contentBounds(this.layout);
    if (!bounds) return;
    const rect = this.element.getBoundingClientRect();
    if (rect.width === 0 || rect.height === 0) return;
    const pad = 60;
    const w = bounds.maxX - bounds.minX + pad * 2;
    const h = bounds.maxY - bounds.minY + pad * 2;
    this.zoom = Math.max(0.25, Math.min(1, rect.width / w, rect.height / h));
    this.pan = {
      x: pad * this.zoom - bounds.minX * this.zoom,
      y: pad * this.zoom - bounds.minY * this.zoom,
    };
    this.applyTransform();
  }

  private renderCard(
    node: IdeaNode,
    index: number,
    pos: Point,
    selected: boolean,
    freshMeta: boolean,
  ): HTMLElement {
    const classes = ["idea-card", `kind-${node.extension_kind}`];
    if (selected) classes.push("selected");
    const card = el("div", {
      class: classes.join(" "),
      dataset: { nodeId: node.id },
    });
    card.style.left = `${pos.x}px`;
    card.style.top = `${pos.y}px`;
    card.style.width = `${CARD_W}px`;

    card.appendChild(
      el("div", { class: "card-head" }, [
        el("span", { class: "card-title", text: `v${index + 1}` }),
        el("span", {
          class: "card-kind",
          text: KIND_LABELS[node.extension_kind],
        }),
      ]),
    );
    card.appendChild(
      el("div", {
        class: "card-progress",
        text: `${doneCount(node)}/${SECTIONS.length} sections done`,
      }),
    );

    if (node.meta_reflection) {
      const metaClasses = freshMeta ? "card-meta fresh" : "card-meta";
      card.appendChild(
        el("div", { class: metaClasses }, [
          el("div", { class: "card-meta-text", text: node.meta_reflection }),
          el("button", {
            class: "card-discuss",
            text: "Discuss",
            onClick: (ev) => {
              ev.stopPropagation();
              this.callbacks.onDiscussMeta(node.id);
            },
          }),
        ]),
      );
    }

    card.appendChild(
      el("div", { class: "card-actions" }, [
        el("button", {
          class: "card-refine",
          text: "Refine",
          title: "Develop this version further (placed to the right)",
          onClick: (ev) => {
            ev.stopPropagation();
            this.callbacks.onExtend(node.id, "refinement");
          },
        }),
        el("button", {
          class: "card-branch",
          text: "Branch",
          title: "Start a variation (placed below)",
          onClick: (ev) => {
            ev.stopPropagation();
            this.callbacks.onExtend(node.id, "branch");
          },
        }),
      ]),
    );

    card.addEventListener("dblclick", () => this.callbacks.onOpen(node.id));
    card.addEventListener("mousedown", (ev) => {
      if (ev.button !== 0) return;
      const target = ev.target as HTMLElement;
      if (target.closest("button")) return;
      ev.stopPropagation();
      this.drag = {
        nodeId: node.id,
        startClientX: ev.clientX,
        startClientY: ev.clientY,
        originX: pos.x,
        originY: pos.y,
        moved: false,
        element: card,
      };
    });
    return card;
  }

  private renderEdges(project: ProjectDoc): SVGElement {
    const bounds = contentBounds(this.layout);
    const width = bounds ? bounds.maxX + CARD_W : CARD_W;
    const height = bounds ? bounds.maxY + CARD_H : CARD_H;
    const svg = svgEl("svg", {
      class: "canvas-edges",
      width: `${width}`,
      height: `${height}`,
    });
    for (const id of Object.keys(project.nodes)) {
      const node = project.nodes[id];
      if (!node.parent_id) continue;
      const from = this.layout.get(node.parent_id);
      const to = this.layout.get(id);
      if (!from || !to) continue;
      const horizontal = node.extension_kind === "refinement";
      const x1 = horizontal ? from.x + CARD_W : from.x + CARD_W / 2;
      const y1 = horizontal ? from.y + CARD_H / 2 : from.y + CARD_H;
      const x2 = horizontal ? to.x : to.x + CARD_W / 2;
      const y2 = horizontal ? to.y + CARD_H / 2 : to.y;
      svg.appendChild(
        svgEl("line", {
          x1: `${x1}`,
          y1: `${y1}`,
          x2: `${x2}`,
          y2: `${y2}`,
          class: `edge edge-${node.extension_kind}`,
        }),
      );
    }
    return svg;
  }

  private bindGestures(): void {
    this.element.addEventListener("mousedown", (ev) => {
      if (ev.button !== 0 || this.drag) return;
      this.panning = {
        startClientX: ev.clientX,
        startClientY: ev.clientY,
        originX: this.pan.x,
        originY: this.pan.y,
      };
    });

    this.element.addEventListener("mousemove", (ev) => {
      if (this.drag) {
        const dx = (ev.clientX - this.drag.startClientX) / this.zoom;
        const dy = (ev.clientY - this.drag.startClientY) / this.zoom;
        if (
          !this.drag.moved &&
          Math.abs(dx) < DRAG_THRESHOLD_PX &&
          Math.abs(dy) < DRAG_THRESHOLD_PX
        ) {
          return;
        }
        this.drag.moved = true;
        const x = this.drag.originX + dx;
        const y = this.drag.originY + dy;
        this.drag.element.style.left = `${x}px`;
        this.drag.element.style.top = `${y}px`;
        this.layout.set(this.drag.nodeId, { x, y });
        return;
      }
      if (this.panning) {
        this.pan = {
          x: this.panning.originX + (ev.clientX - this.panning.startClientX),
          y: this.panning.originY + (ev.clientY - this.panning.startClientY),
        };
        this.applyTransform();
      }
    });

    this.element.addEventListener("mouseup", () => {
      if (this.drag) {
        const { nodeId, moved } = this.drag;
        const finalPos = this.layout.get(nodeId);
        this.drag = null;
        if (moved && finalPos) {
          this.callbacks.onMove(nodeId, { ...finalPos });
        } else {
          this.callbacks.onSelect(nodeId);
        }
      }
      this.panning = null;
    });

    this.element.addEventListener("mouseleave", () => {
      this.panning = null;
    });

    this.element.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY > 0 ? 0.9 : 1.1;
      const next = Math.max(0.25, Math.min(2.5, this.zoom * factor));
      const rect = this.element.getBoundingClientRect();
      const mx = ev.clientX - rect.left;
      const my = ev.clientY - rect.top;
      const worldX = (mx - this.pan.x) / this.zoom;
      const worldY = (my - this.pan.y) / this.zoom;
      this.zoom = next;
      this.pan = { x: mx - worldX * next, y: my - worldY * next };
      this.applyTransform();
    });
  }

  private applyTransform(): void {
    this.world.style.transform = `translate(${this.pan.x}px, ${this.pan.y}px) scale(${this.zoom})`;
  }
}
