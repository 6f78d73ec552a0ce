/**
 * View state for the three-pane client.
 *
 * Holds what is selected and what is in flight; never holds plan content.
 * Invariant: a section can only be open while a node is selected, so
 * changing or clearing the selection closes the section with it.
 */

import type { Point, SectionTag } from "./types";

export interface ViewState {
  selectedNode: string | null;
  openSection: SectionTag | null;
  pan: Point;
  zoom: number;
  pending: ReadonlySet<string>;
}

type Listener = (state: ViewState) => void;

export class ViewStateStore {
  private selectedNode: string | null = null;
  private openSection: SectionTag | null = null;
  private pan: Point = { x: 40, y: 40 };
  private zoom = 1;
  private pending = new Set<string>();
  private listeners: Listener[] = [];

  snapshot(): ViewState {
    return {
      selectedNode: this.selectedNode,
      openSection: this.openSection,
      pan: { ...this.pan },
      zoom: this.zoom,
      pending: new Set(this.pending),
    };
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  selectNode(id: string | null): void {
    if (id === this.selectedNode) return;
    this.selectedNode = id;
    this.openSection = null;
    this.emit();
  }

  setOpenSection(tag: SectionTag | null): void {
    if (tag !== null && this.selectedNode === null) {
      throw new Error("cannot open a section without a selected node");
    }
    if (tag === this.openSection) return;
    this.openSection = tag;
    this.emit();
  }

  setPan(pan: Point): void {
    this.pan = { ...pan };
    this.emit();
  }

  setZoom(zoom: number): void {
    this.zoom = Math.max(0.25, Math.min(2.5, zoom));
    this.emit();
  }

  /** Claim an operation tag; false means one is already in flight. */
  begin(tag: string): boolean {
    if (this.pending.has(tag)) return false;
    this.pending.add(tag);
    this.emit();
    return true;
  }

  end(tag: string): void {
    if (this.pending.delete(tag)) this.emit();
  }

  isPending(tag: string): boolean {
    return this.pending.has(tag);
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const fn of [...this.listeners]) fn(snap);
  }
}

export function chatOpTag(nodeId: string, section: SectionTag | "meta"): string {
  return `chat:${nodeId}:${section}`;
}
